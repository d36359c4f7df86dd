//! Assessment pipeline: decompile, measure distortion, recompile, compare
//! bytecode, run tests, classify.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astdiff::{distortion, Distortion};
use crate::compiler::{compile, compile_source, Variant};
use crate::decomp::{decompile, DecompStatus, DecompilerSpec};
use crate::lang::{parse, ClassAst, Diagnostic};
use crate::vm::{bytecode_equal, run_suite, to_text, BytecodeClass, TestCase, TestReport, Verdict, DEFAULT_FUEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    EmptyOutput,
    NotRecompilable,
    Deceptive,
    EquivModuloInputs,
    StrictlyEquivalent,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::EmptyOutput,
        Category::NotRecompilable,
        Category::Deceptive,
        Category::EquivModuloInputs,
        Category::StrictlyEquivalent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::EmptyOutput => "EmptyOutput",
            Category::NotRecompilable => "NotRecompilable",
            Category::Deceptive => "Deceptive",
            Category::EquivModuloInputs => "EquivModuloInputs",
            Category::StrictlyEquivalent => "StrictlyEquivalent",
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Crashes count as failures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCounts {
    pub pass: usize,
    pub fail: usize,
    pub timeout: usize,
}

impl TestCounts {
    pub fn of(r: &TestReport) -> TestCounts {
        let mut c = TestCounts::default();
        for (_, v) in &r.verdicts {
            match v {
                Verdict::Pass => c.pass += 1,
                Verdict::Timeout => c.timeout += 1,
                Verdict::Fail(_) | Verdict::Crash(_) => c.fail += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.timeout
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRecord {
    pub class: String,
    pub compiler: Variant,
    pub decompiler: String,
    pub category: Category,
    pub distortion: Option<Distortion>,
    pub bytecode_identical: Option<bool>,
    pub tests: Option<TestCounts>,
    pub elapsed_ms: u64,
}

/// How far the pipeline got for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub output_empty: bool,
    pub recompiled: bool,
    pub bytecode_identical: Option<bool>,
    pub tests: Option<TestCounts>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("empty output cannot have later stage results")]
    EmptyWithResults,
    #[error("bytecode comparison present without recompilation, or missing after it")]
    BytecodeStage,
    #[error("test results present without recompilation")]
    TestsWithoutRecompile,
}

/// The unique category for a consistent set of stage results.
///
/// A class with no tests that recompiles to different bytecode counts as
/// equivalent modulo inputs, vacuously.
pub fn classify(s: &Stages) -> Result<Category, ClassifyError> {
    if s.output_empty {
        if s.recompiled || s.bytecode_identical.is_some() || s.tests.is_some() {
            return Err(ClassifyError::EmptyWithResults);
        }
        return Ok(Category::EmptyOutput);
    }
    if !s.recompiled {
        if s.bytecode_identical.is_some() {
            return Err(ClassifyError::BytecodeStage);
        }
        if s.tests.is_some() {
            return Err(ClassifyError::TestsWithoutRecompile);
        }
        return Ok(Category::NotRecompilable);
    }
    match s.bytecode_identical {
        None => Err(ClassifyError::BytecodeStage),
        Some(true) => Ok(Category::StrictlyEquivalent),
        Some(false) => match s.tests {
            Some(t) if t.fail + t.timeout > 0 => Ok(Category::Deceptive),
            _ => Ok(Category::EquivModuloInputs),
        },
    }
}

#[derive(Debug, Error)]
pub enum AssessError {
    #[error("original class does not compile: {}", first(.0))]
    Original(Vec<Diagnostic>),
    #[error("scratch directory {path}: {source}")]
    Scratch { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

fn first(d: &[Diagnostic]) -> String {
    d.first().map(|d| d.message.clone()).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct AssessOptions {
    pub fuel: u64,
    /// Directory for the intermediate artifacts of this run.
    pub scratch: Option<PathBuf>,
}

impl Default for AssessOptions {
    fn default() -> Self {
        AssessOptions { fuel: DEFAULT_FUEL, scratch: None }
    }
}

/// Everything an assessment produced, including the decompiled text.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub record: AssessmentRecord,
    pub source: Option<String>,
    pub report: Option<TestReport>,
}

pub fn assess(
    class_src: &str,
    compiler: Variant,
    decompiler: &DecompilerSpec,
    tests: &[TestCase],
    opts: &AssessOptions,
) -> Result<Assessment, AssessError> {
    let start = Instant::now();
    let (original, bc) = compile_original(class_src, compiler)?;
    let out = decompile(decompiler, &bc);
    let source = match out.status {
        DecompStatus::Source(s) => Some(s),
        DecompStatus::Empty => None,
    };
    assess_output(&original, &bc, compiler, &decompiler.name, source, tests, opts, start)
}

pub fn compile_original(class_src: &str, compiler: Variant) -> Result<(ClassAst, BytecodeClass), AssessError> {
    let original = parse(class_src).map_err(AssessError::Original)?;
    let bc = compile(&original, compiler).map_err(AssessError::Original)?;
    Ok((original, bc))
}

/// Runs the stages after decompilation on an already produced output.
/// `source` is `None` for empty output.
#[allow(clippy::too_many_arguments)]
pub fn assess_output(
    original: &ClassAst,
    bc: &BytecodeClass,
    compiler: Variant,
    decompiler: &str,
    source: Option<String>,
    tests: &[TestCase],
    opts: &AssessOptions,
    start: Instant,
) -> Result<Assessment, AssessError> {
    let scratch = |name: &str, text: &str| -> Result<(), AssessError> {
        if let Some(dir) = &opts.scratch {
            let io = |source| AssessError::Scratch { path: dir.clone(), source };
            std::fs::create_dir_all(dir).map_err(io)?;
            std::fs::write(dir.join(name), text).map_err(io)?;
        }
        Ok(())
    };
    scratch("original.mjc", &to_text(bc))?;
    let mut stages =
        Stages { output_empty: source.is_none(), recompiled: false, bytecode_identical: None, tests: None };
    let mut dist = None;
    let mut report = None;
    if let Some(text) = &source {
        scratch("decompiled.mj", text)?;
        if let Ok(ast) = parse(text) {
            dist = Some(distortion(original, &ast));
        }
        match compile_source(text, compiler) {
            Ok(re) => {
                scratch("recompiled.mjc", &to_text(&re))?;
                stages.recompiled = true;
                stages.bytecode_identical = Some(bytecode_equal(bc, &re).is_ok());
                if !tests.is_empty() {
                    let r = run_suite(&re, tests, opts.fuel);
                    stages.tests = Some(TestCounts::of(&r));
                    report = Some(r);
                }
            }
            Err(diags) => {
                let text: String =
                    diags.iter().map(|d| format!("{}..{}: {}\n", d.span.start, d.span.end, d.message)).collect();
                scratch("diagnostics.txt", &text)?;
            }
        }
    }
    let category = classify(&stages)?;
    let record = AssessmentRecord {
        class: original.name.clone(),
        compiler,
        decompiler: decompiler.to_string(),
        category,
        distortion: dist,
        bytecode_identical: stages.bytecode_identical,
        tests: stages.tests,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    if opts.scratch.is_some() {
        scratch("record.json", &serde_json::to_string_pretty(&record).expect("record serializes"))?;
    }
    Ok(Assessment { record, source, report })
}

#[cfg(test)]
mod tests;
