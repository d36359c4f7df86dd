use mdlab::assess::{AssessmentRecord, Category};
use mdlab::compiler::Variant;
use mdlab::harness::config::{Config, ExternalAdapter};
use mdlab::harness::corpus::{gen_corpus, MIN_SIZE};
use mdlab::harness::experiment::{
    canonical_json, read_jsonl, run_experiment, MetaRecord, RunOptions, META_FILE, RECORDS_FILE,
};

#[test]
fn one_record_per_triple_and_one_meta_per_pair() {
    let corpus = gen_corpus(1, MIN_SIZE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        jobs: 4,
        out: Some(dir.path().join("out")),
        work: Some(dir.path().join("work")),
        ..RunOptions::default()
    };
    let out = run_experiment(&corpus, &Config::default(), &opts).unwrap();
    assert!(out.faults.is_empty(), "{:?}", out.faults);
    assert_eq!(out.records.len(), MIN_SIZE * 2 * 3);
    assert_eq!(out.meta.len(), MIN_SIZE * 2);

    let mut streamed: Vec<AssessmentRecord> = read_jsonl(&dir.path().join("out").join(RECORDS_FILE)).unwrap();
    streamed.sort_by(|a, b| (&a.class, a.compiler, &a.decompiler).cmp(&(&b.class, b.compiler, &b.decompiler)));
    assert_eq!(canonical_json(&streamed), canonical_json(&out.records));
    let metas: Vec<MetaRecord> = read_jsonl(&dir.path().join("out").join(META_FILE)).unwrap();
    assert_eq!(metas.len(), out.meta.len());

    let cell = dir.path().join("work/golden.Foo/A/sugarer");
    for f in ["original.mjc", "decompiled.mj", "recompiled.mjc", "record.json"] {
        assert!(cell.join(f).is_file(), "{f}");
    }
    assert!(dir.path().join("work/golden.Report/B/literalist/diagnostics.txt").is_file());
    assert!(dir.path().join("work/golden.Report/B/meta/recompiled.mjc").is_file());
}

#[test]
fn job_count_does_not_change_results() {
    let corpus = gen_corpus(3, 20).unwrap();
    let run = |jobs| {
        let out = run_experiment(&corpus, &Config::default(), &RunOptions { jobs, ..RunOptions::default() }).unwrap();
        canonical_json(&out)
    };
    let one = run(1);
    assert_eq!(one, run(6));
    assert!(!one.contains("elapsed_ms"));
}

#[test]
fn failing_external_adapter_yields_empty_output() {
    let corpus = gen_corpus(1, MIN_SIZE).unwrap();
    let config = Config {
        decompilers: vec!["literalist".into(), "broken".into()],
        external: vec![ExternalAdapter { name: "broken".into(), command: "exit 1".into(), timeout_secs: 5 }],
        ..Config::default()
    };
    let opts = RunOptions { compilers: vec![Variant::A], ..RunOptions::default() };
    let out = run_experiment(&corpus, &config, &opts).unwrap();
    let broken: Vec<_> = out.records.iter().filter(|r| r.decompiler == "broken").collect();
    assert_eq!(broken.len(), MIN_SIZE);
    assert!(broken.iter().all(|r| r.category == Category::EmptyOutput));
    assert!(out.faults.is_empty());
}

#[test]
fn excluded_tests_are_not_run() {
    let corpus = gen_corpus(1, MIN_SIZE).unwrap();
    let ids: Vec<String> = corpus.tests["golden.Walker"].iter().map(|t| format!("golden.Walker/{}", t.id)).collect();
    let config = Config { decompilers: vec!["literalist".into()], excluded_tests: ids, ..Config::default() };
    let opts = RunOptions { compilers: vec![Variant::A], ..RunOptions::default() };
    let out = run_experiment(&corpus, &config, &opts).unwrap();
    let walker = out.records.iter().find(|r| r.class == "golden.Walker").unwrap();
    assert_eq!(walker.tests, None);
    assert_eq!(walker.category, Category::StrictlyEquivalent);
}
