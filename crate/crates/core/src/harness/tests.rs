use super::corpus::*;
use super::golden::GOLDEN;
use crate::assess::{assess, AssessOptions};
use crate::compiler::Variant;
use crate::decomp::{Builtin, DecompilerSpec};

#[test]
fn default_corpus_lints_clean() {
    let c = gen_corpus(DEFAULT_SEED, DEFAULT_SIZE).unwrap();
    assert_eq!(c.manifest.classes.len(), DEFAULT_SIZE);
    let problems = lint(&c);
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}

#[test]
fn golden_labels_hold() {
    let mut bad = Vec::new();
    for g in GOLDEN {
        let tests = gen_corpus(DEFAULT_SEED, MIN_SIZE).unwrap().tests[g.name].clone();
        for v in Variant::ALL {
            for b in Builtin::ALL {
                let r = assess(g.source, v, &DecompilerSpec::builtin(b), &tests, &AssessOptions::default()).unwrap();
                if r.record.category != g.label(v, b) {
                    bad.push(format!(
                        "{} {v} {}: labeled {} got {}",
                        g.name,
                        b.name(),
                        g.label(v, b),
                        r.record.category
                    ));
                }
            }
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn predictions_match_outcomes_across_seeds() {
    use super::oracle::predict;
    use crate::compiler::compile_source;
    let mut bad = Vec::new();
    for seed in 1..=4 {
        let c = gen_corpus(seed, DEFAULT_SIZE).unwrap();
        for e in &c.manifest.classes {
            let src = &c.sources[&e.qualified_name];
            let tests = &c.tests[&e.qualified_name];
            for v in Variant::ALL {
                let bc = compile_source(src, v).unwrap();
                for b in Builtin::ALL {
                    let spec = DecompilerSpec::builtin(b);
                    let expected = predict(&bc, &spec);
                    let got = assess(src, v, &spec, tests, &AssessOptions::default()).unwrap();
                    if !expected.admits(got.record.category) {
                        bad.push(format!(
                            "seed {seed} {} {v} {}: expected {expected:?} got {}\n{}",
                            e.qualified_name,
                            b.name(),
                            got.record.category,
                            got.source.unwrap_or_default()
                        ));
                    }
                }
            }
        }
    }
    assert!(bad.is_empty(), "{} mismatches\n{}", bad.len(), bad.join("\n"));
}

#[test]
#[ignore]
fn dump_default_corpus() {
    gen_corpus(DEFAULT_SEED, DEFAULT_SIZE).unwrap().write(std::path::Path::new("/tmp/peek")).unwrap();
}
