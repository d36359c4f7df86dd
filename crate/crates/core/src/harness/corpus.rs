//! Generated corpora: classes, their tests, and the manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::gen;
use super::golden::GOLDEN;
use crate::assess::Category;
use crate::compiler::{compile_source, Variant};
use crate::decomp::shapes::{detect, Shape};
use crate::lang::{parse, MemberBody};
use crate::vm::interp::RunStatus;
use crate::vm::testcase::Arg;
use crate::vm::*;

pub const MIN_SIZE: usize = 12;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SIZE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureTag {
    ConcatSugar,
    SyntheticWrapper,
    NestedPrivateCtor,
    OverloadHazard,
    StraightLine,
    TryCatchLoop,
    StaticSetter,
}

impl FeatureTag {
    pub const ALL: [FeatureTag; 7] = [
        FeatureTag::ConcatSugar,
        FeatureTag::SyntheticWrapper,
        FeatureTag::NestedPrivateCtor,
        FeatureTag::OverloadHazard,
        FeatureTag::StraightLine,
        FeatureTag::TryCatchLoop,
        FeatureTag::StaticSetter,
    ];
}

/// What a class was built to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Straight,
    Concat,
    Wrapper,
    /// A seeded decompiler bug that recompiles but misbehaves.
    Deceptive,
    /// Every backend fails, each on a different member.
    Disjoint,
    /// Every backend fails on one shared member.
    SameMember,
    /// Exactly one backend succeeds.
    UniqueSuccess,
    TryCatchLoop,
    Filler,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub path: String,
    pub qualified_name: String,
    pub feature_tags: Vec<FeatureTag>,
    pub test_files: Vec<String>,
    pub role: Role,
    /// Hand-assigned categories keyed `A/literalist`, for the golden subset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, Category>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub classes: Vec<ClassEntry>,
}

/// A corpus held in memory.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub sources: BTreeMap<String, String>,
    pub tests: BTreeMap<String, Vec<TestCase>>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus size {0} is below the minimum of {MIN_SIZE}")]
    TooSmall(usize),
    #[error("{class}: {message}")]
    Class { class: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

fn class_err(class: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Class { class: class.to_string(), message: message.into() }
}

/// A class before its tests are computed.
pub(super) struct Draft {
    pub name: String,
    pub source: String,
    pub entry: String,
    pub args: Vec<Vec<Arg>>,
    pub role: Role,
    pub tags: Option<Vec<FeatureTag>>,
    pub labels: Option<BTreeMap<String, Category>>,
}

/// Builds the corpus for `seed`. The golden classes come first, then the
/// engineered classes, then random fillers; a corpus smaller than the
/// full engineered set keeps a prefix of that order.
pub fn gen_corpus(seed: u64, size: usize) -> Result<Corpus, CorpusError> {
    if size < MIN_SIZE {
        return Err(CorpusError::TooSmall(size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drafts: Vec<Draft> = GOLDEN
        .iter()
        .map(|g| Draft {
            name: g.name.to_string(),
            source: g.source.to_string(),
            entry: g.entry.to_string(),
            args: (g.args)(),
            role: g.role,
            tags: Some(g.tags.to_vec()),
            labels: Some(
                Variant::ALL
                    .iter()
                    .flat_map(|&v| crate::decomp::Builtin::ALL.iter().map(move |&b| (v, b)))
                    .map(|(v, b)| (format!("{v}/{}", b.name()), g.label(v, b)))
                    .collect(),
            ),
        })
        .collect();
    let plan: &[(Role, usize)] =
        &[(Role::Straight, 5), (Role::Concat, 3), (Role::Wrapper, 2), (Role::Disjoint, 10), (Role::SameMember, 3)];
    let mut counter: BTreeMap<Role, usize> = BTreeMap::new();
    for &(role, n) in plan {
        for _ in 0..n {
            if drafts.len() >= size {
                break;
            }
            let k = counter.entry(role).or_default();
            drafts.push(gen::draft(&mut rng, role, *k));
            *k += 1;
        }
    }
    let mut k = 0;
    while drafts.len() < size {
        drafts.push(gen::draft(&mut rng, Role::Filler, k));
        k += 1;
    }
    let mut corpus = Corpus {
        manifest: CorpusManifest { seed, classes: Vec::new() },
        sources: BTreeMap::new(),
        tests: BTreeMap::new(),
    };
    for d in drafts {
        let tests = make_tests(&d)?;
        let tags = match d.tags {
            Some(t) => t,
            None => observed_tags(&d.name, &d.source)?,
        };
        corpus.manifest.classes.push(ClassEntry {
            path: format!("src/{}.mj", d.name),
            qualified_name: d.name.clone(),
            feature_tags: tags,
            test_files: vec![format!("tests/{}.tj", d.name)],
            role: d.role,
            labels: d.labels,
        });
        corpus.sources.insert(d.name.clone(), d.source);
        corpus.tests.insert(d.name, tests);
    }
    Ok(corpus)
}

/// Runs the original (variant A) on each argument list to get expectations.
fn make_tests(d: &Draft) -> Result<Vec<TestCase>, CorpusError> {
    let bc = compile_source(&d.source, Variant::A)
        .map_err(|e| class_err(&d.name, format!("does not compile: {}\n{}", e[0].message, d.source)))?;
    let prog = Program::load(&[&bc]);
    let mut out = Vec::new();
    for (i, args) in d.args.iter().enumerate() {
        let obs = prog.run(&d.entry, args, DEFAULT_FUEL);
        let outcome = match obs.status {
            RunStatus::Completed(o) => o,
            other => return Err(class_err(&d.name, format!("original run of {} gave {other:?}", d.entry))),
        };
        out.push(TestCase {
            id: format!("t{i}"),
            entry: d.entry.clone(),
            args: args.clone(),
            expected_stdout: obs.stdout,
            expected_outcome: outcome,
        });
    }
    Ok(out)
}

/// Tags whose predicates hold for `source`.
pub fn observed_tags(name: &str, source: &str) -> Result<Vec<FeatureTag>, CorpusError> {
    let bc = compile_source(source, Variant::A).map_err(|e| class_err(name, e[0].message.clone()))?;
    let ast = parse(source).map_err(|e| class_err(name, e[0].message.clone()))?;
    let classes = bc.all_classes();
    let methods = || classes.iter().flat_map(|c| c.methods.iter());
    let mut tags = Vec::new();
    for t in FeatureTag::ALL {
        let on = match t {
            FeatureTag::ConcatSugar => methods().any(|m| m.code.contains(&Insn::BuilderNew)),
            FeatureTag::SyntheticWrapper => {
                methods().any(|m| m.flags.synthetic && !m.is_clinit() && !m.params.is_empty())
            }
            FeatureTag::NestedPrivateCtor => ast.members.iter().any(|m| match &m.body {
                MemberBody::Nested(n) => {
                    n.members.iter().any(|x| matches!(&x.body, MemberBody::Constructor(c) if c.modifiers.private))
                }
                _ => false,
            }),
            FeatureTag::OverloadHazard => !detect(Shape::OverloadCastElision, &bc).is_empty(),
            FeatureTag::StraightLine => {
                methods().all(|m| m.handlers.is_empty() && m.code.iter().all(|i| i.jump_target().is_none()))
                    && detect(Shape::MultilineString, &bc).is_empty()
            }
            FeatureTag::TryCatchLoop => !detect(Shape::HandlerInLoop, &bc).is_empty(),
            FeatureTag::StaticSetter => !detect(Shape::StaticSetterShadow, &bc).is_empty(),
        };
        if on {
            tags.push(t);
        }
    }
    Ok(tags)
}

/// Checks that every class compiles under both variants, that its tags
/// match the predicates, and that its tests pass on the original.
pub fn lint(c: &Corpus) -> Vec<String> {
    let mut problems = Vec::new();
    let mut names = BTreeSet::new();
    for e in &c.manifest.classes {
        let n = &e.qualified_name;
        if !names.insert(n) {
            problems.push(format!("{n}: listed twice"));
        }
        let Some(src) = c.sources.get(n) else {
            problems.push(format!("{n}: missing source"));
            continue;
        };
        for v in Variant::ALL {
            match compile_source(src, v) {
                Ok(bc) => {
                    let tests = c.tests.get(n).map(Vec::as_slice).unwrap_or_default();
                    let r = run_suite(&bc, tests, DEFAULT_FUEL);
                    if !r.all_pass() {
                        problems.push(format!("{n}: original fails its tests under {v}"));
                    }
                }
                Err(d) => problems.push(format!("{n}: does not compile under {v}: {}", d[0].message)),
            }
        }
        match observed_tags(n, src) {
            Ok(tags) if tags != e.feature_tags => {
                problems.push(format!("{n}: tags {:?} but predicates give {:?}", e.feature_tags, tags))
            }
            Ok(_) => {}
            Err(err) => problems.push(err.to_string()),
        }
    }
    problems
}

impl Corpus {
    pub fn entry(&self, name: &str) -> Option<&ClassEntry> {
        self.manifest.classes.iter().find(|e| e.qualified_name == name)
    }

    pub fn names_with_role(&self, role: Role) -> Vec<&str> {
        self.manifest.classes.iter().filter(|e| e.role == role).map(|e| e.qualified_name.as_str()).collect()
    }

    pub fn names_with_tag(&self, tag: FeatureTag) -> Vec<&str> {
        self.manifest
            .classes
            .iter()
            .filter(|e| e.feature_tags.contains(&tag))
            .map(|e| e.qualified_name.as_str())
            .collect()
    }

    pub fn write(&self, dir: &Path) -> Result<(), CorpusError> {
        let io = |p: &Path| {
            let path = p.display().to_string();
            move |source| CorpusError::Io { path, source }
        };
        for sub in ["src", "tests"] {
            std::fs::create_dir_all(dir.join(sub)).map_err(io(&dir.join(sub)))?;
        }
        for e in &self.manifest.classes {
            let p = dir.join(&e.path);
            std::fs::write(&p, &self.sources[&e.qualified_name]).map_err(io(&p))?;
            let p = dir.join(&e.test_files[0]);
            std::fs::write(&p, tests_to_text(&self.tests[&e.qualified_name])).map_err(io(&p))?;
        }
        let p = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(&p, json + "\n").map_err(io(&p))
    }

    pub fn load(dir: &Path) -> Result<Corpus, CorpusError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| CorpusError::Io { path: p.display().to_string(), source })
        };
        let mp = dir.join("manifest.json");
        let manifest: CorpusManifest = serde_json::from_str(&read(&mp)?)
            .map_err(|e| CorpusError::Format { path: mp.display().to_string(), message: e.to_string() })?;
        let mut sources = BTreeMap::new();
        let mut tests = BTreeMap::new();
        for e in &manifest.classes {
            sources.insert(e.qualified_name.clone(), read(&dir.join(&e.path))?);
            let mut all = Vec::new();
            for tf in &e.test_files {
                let p = dir.join(tf);
                let text = read(&p)?;
                if !text.trim().is_empty() {
                    all.extend(parse_tests(&text).map_err(|err| CorpusError::Format {
                        path: p.display().to_string(),
                        message: err.to_string(),
                    })?);
                }
            }
            tests.insert(e.qualified_name.clone(), all);
        }
        Ok(Corpus { manifest, sources, tests })
    }
}
