//! Runs every (class, compiler, decompiler) triple and every
//! (class, compiler) meta-decompilation over a corpus.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{Config, ConfigError};
use super::corpus::{lint, Corpus};
use crate::assess::{assess, assess_output, compile_original, AssessOptions, AssessmentRecord};
use crate::compiler::Variant;
use crate::decomp::DecompilerSpec;
use crate::meta::{meta_decompile, MetaResult};
use crate::report::META;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const META_FILE: &str = "meta.jsonl";
pub const FAULTS_FILE: &str = "faults.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaRecord {
    pub class: String,
    pub compiler: Variant,
    pub result: MetaResult,
    /// The merged output put through the same assessment as a single
    /// decompiler, named `meta`.
    pub record: AssessmentRecord,
}

/// A tool fault: the harness, not the subject, went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub class: String,
    pub compiler: Variant,
    pub decompiler: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub records: Vec<AssessmentRecord>,
    pub meta: Vec<MetaRecord>,
    pub faults: Vec<Fault>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub jobs: usize,
    /// Root of the `work/<class>/<compiler>/<decompiler>/` scratch tree.
    pub work: Option<PathBuf>,
    /// Directory receiving the JSONL streams.
    pub out: Option<PathBuf>,
    pub compilers: Vec<Variant>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1, work: None, out: None, compilers: Variant::ALL.to_vec() }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("corpus lint failed:\n{}", .0.join("\n"))]
    Lint(Vec<String>),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

struct Stream {
    path: PathBuf,
    file: Mutex<Option<BufWriter<File>>>,
}

impl Stream {
    fn open(dir: Option<&Path>, name: &str) -> Result<Stream, ExperimentError> {
        let path = dir.map(|d| d.join(name)).unwrap_or_default();
        let file = match dir {
            Some(_) => Some(BufWriter::new(
                File::create(&path).map_err(|source| ExperimentError::Io { path: path.clone(), source })?,
            )),
            None => None,
        };
        Ok(Stream { path, file: Mutex::new(file) })
    }

    fn push<T: Serialize>(&self, item: &T) -> Result<(), ExperimentError> {
        let mut guard = self.file.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(w) = guard.as_mut() {
            let line = serde_json::to_string(item).expect("record serializes");
            writeln!(w, "{line}")
                .and_then(|_| w.flush())
                .map_err(|source| ExperimentError::Io { path: self.path.clone(), source })?;
        }
        Ok(())
    }
}

enum Task<'a> {
    Single(&'a str, Variant, &'a DecompilerSpec),
    Meta(&'a str, Variant),
}

enum Done {
    Record(AssessmentRecord),
    Meta(Box<MetaRecord>),
    Fault(Fault),
}

fn panic_text(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".to_string())
}

fn dir_name(class: &str) -> String {
    class.replace(['/', '\\'], "_")
}

pub fn run_experiment(corpus: &Corpus, config: &Config, opts: &RunOptions) -> Result<RunOutput, ExperimentError> {
    config.validate()?;
    let problems = lint(corpus);
    if !problems.is_empty() {
        return Err(ExperimentError::Lint(problems));
    }
    let singles = config.specs(&config.decompilers)?;
    let order = config.specs(&config.meta_order)?;
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.clone(), source })?;
    }
    let out_dir = opts.out.as_deref();
    let records = Stream::open(out_dir, RECORDS_FILE)?;
    let metas = Stream::open(out_dir, META_FILE)?;
    let faults = Stream::open(out_dir, FAULTS_FILE)?;

    let mut tasks = Vec::new();
    for e in &corpus.manifest.classes {
        for &v in &opts.compilers {
            for s in &singles {
                tasks.push(Task::Single(&e.qualified_name, v, s));
            }
            tasks.push(Task::Meta(&e.qualified_name, v));
        }
    }

    let scratch = |class: &str, v: Variant, d: &str| {
        opts.work.as_ref().map(|w| w.join(dir_name(class)).join(v.to_string()).join(d))
    };
    let run = |t: &Task| -> Done {
        let (class, v, dname) = match t {
            Task::Single(c, v, s) => (*c, *v, s.name.as_str()),
            Task::Meta(c, v) => (*c, *v, META),
        };
        let fault = |message: String| {
            Done::Fault(Fault { class: class.into(), compiler: v, decompiler: dname.into(), message })
        };
        let src = &corpus.sources[class];
        let tests = config.filter_tests(class, &corpus.tests[class]);
        let aopts = AssessOptions { fuel: config.fuel, scratch: scratch(class, v, dname) };
        let body = || match t {
            Task::Single(_, _, spec) => match assess(src, v, spec, &tests, &aopts) {
                Ok(a) => Done::Record(a.record),
                Err(e) => fault(e.to_string()),
            },
            Task::Meta(..) => {
                let start = Instant::now();
                let (original, bc) = match compile_original(src, v) {
                    Ok(x) => x,
                    Err(e) => return fault(e.to_string()),
                };
                let result = match meta_decompile(&bc, &order, v) {
                    Ok(r) => r,
                    Err(e) => return fault(e.to_string()),
                };
                let source = result.source().map(str::to_string);
                match assess_output(&original, &bc, v, META, source, &tests, &aopts, start) {
                    Ok(a) => {
                        Done::Meta(Box::new(MetaRecord { class: class.into(), compiler: v, result, record: a.record }))
                    }
                    Err(e) => fault(e.to_string()),
                }
            }
        };
        catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| fault(panic_text(p)))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let done: Vec<Result<Done, ExperimentError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let d = run(t);
                match &d {
                    Done::Record(r) => records.push(r)?,
                    Done::Meta(m) => metas.push(m)?,
                    Done::Fault(f) => faults.push(f)?,
                }
                Ok(d)
            })
            .collect()
    });

    let mut output = RunOutput::default();
    for d in done {
        match d? {
            Done::Record(r) => output.records.push(r),
            Done::Meta(m) => output.meta.push(*m),
            Done::Fault(f) => output.faults.push(f),
        }
    }
    output.records.sort_by(|a, b| (&a.class, a.compiler, &a.decompiler).cmp(&(&b.class, b.compiler, &b.decompiler)));
    output.meta.sort_by(|a, b| (&a.class, a.compiler).cmp(&(&b.class, b.compiler)));
    output.faults.sort_by(|a, b| (&a.class, a.compiler, &a.decompiler).cmp(&(&b.class, b.compiler, &b.decompiler)));
    Ok(output)
}

fn strip_elapsed(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("elapsed_ms");
            m.values_mut().for_each(strip_elapsed);
        }
        serde_json::Value::Array(xs) => xs.iter_mut().for_each(strip_elapsed),
        _ => {}
    }
}

/// Key-sorted JSON of any serializable value, with every `elapsed_ms`
/// field removed.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("value serializes");
    strip_elapsed(&mut v);
    serde_json::to_string_pretty(&v).expect("value serializes") + "\n"
}

/// Reads a JSONL stream written by [`run_experiment`].
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ExperimentError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ExperimentError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)),
            })
        })
        .collect()
}
