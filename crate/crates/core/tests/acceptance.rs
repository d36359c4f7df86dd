//! Acceptance suite. Runs without the libtest harness and prints one line
//! per criterion; exits nonzero when any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::oracle::brute_force_distance;
use common::small_tree;
use mdlab::assess::{assess, assess_output, compile_original, AssessOptions, AssessmentRecord, Category};
use mdlab::astdiff::{class_tree, diff_trees, edit_script, normalize_names};
use mdlab::compiler::{compile_source, Variant};
use mdlab::decomp::shapes::FailureMode;
use mdlab::decomp::{decompile, Builtin, DecompilerSpec};
use mdlab::harness::config::Config;
use mdlab::harness::corpus::{gen_corpus, Corpus, FeatureTag, Role, DEFAULT_SEED, DEFAULT_SIZE};
use mdlab::harness::experiment::{canonical_json, run_experiment, RunOptions, RunOutput};
use mdlab::harness::oracle::{predict, Expected};
use mdlab::lang::parse;
use mdlab::meta::meta_decompile;
use mdlab::report::{build_report, overlap, summarize, Block, SummaryRow, META};
use mdlab::vm::{BytecodeClass, Verdict};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config as PtConfig, RngAlgorithm, TestRng, TestRunner};

const PIPELINE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_LIMIT: Duration = Duration::from_secs(30);
const META_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_PAIRS: usize = 500;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Run) -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    ensure(took < limit, || format!("took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
}

struct Run {
    corpus: Corpus,
    out: RunOutput,
    took: Duration,
}

impl Run {
    fn record(&self, class: &str, v: Variant, d: &str) -> &AssessmentRecord {
        self.out.records.iter().find(|r| r.class == class && r.compiler == v && r.decompiler == d).unwrap()
    }

    fn all_records(&self) -> Vec<AssessmentRecord> {
        let mut rs = self.out.records.clone();
        rs.extend(self.out.meta.iter().map(|m| m.record.clone()));
        rs
    }

    fn bytecode(&self, class: &str, v: Variant) -> BytecodeClass {
        compile_source(&self.corpus.sources[class], v).unwrap()
    }
}

fn full_run(jobs: usize) -> Run {
    let start = Instant::now();
    let corpus = gen_corpus(DEFAULT_SEED, DEFAULT_SIZE).unwrap();
    let out = run_experiment(&corpus, &Config::default(), &RunOptions { jobs, ..RunOptions::default() }).unwrap();
    Run { corpus, out, took: start.elapsed() }
}

fn passes(c: Category) -> bool {
    matches!(c, Category::EquivModuloInputs | Category::StrictlyEquivalent)
}

fn pipeline_totality(run: &Run) -> Outcome {
    within(PIPELINE_LIMIT, run.took)?;
    ensure(run.out.faults.is_empty(), || format!("faults: {:?}", run.out.faults))?;
    let n = run.corpus.manifest.classes.len();
    ensure(run.out.records.len() == n * 2 * 3, || format!("{} records", run.out.records.len()))?;
    ensure(run.out.meta.len() == n * 2, || format!("{} meta results", run.out.meta.len()))?;
    let keys: BTreeSet<_> = run.out.records.iter().map(|r| (&r.class, r.compiler, &r.decompiler)).collect();
    ensure(keys.len() == run.out.records.len(), || "duplicate triple".into())?;
    for e in &run.corpus.manifest.classes {
        for v in Variant::ALL {
            for b in Builtin::ALL {
                ensure(keys.contains(&(&e.qualified_name, v, &b.name().to_string())), || {
                    format!("missing {}/{v}/{}", e.qualified_name, b.name())
                })?;
            }
        }
    }
    let golden: Vec<_> = run.corpus.manifest.classes.iter().filter(|e| e.labels.is_some()).collect();
    let mut matched = 0;
    let mut wrong = Vec::new();
    for e in &golden {
        let labels = e.labels.as_ref().unwrap();
        let mut ok = labels.len() == 6;
        for (key, want) in labels {
            let (v, d) = key.split_once('/').unwrap();
            let got = run.record(&e.qualified_name, v.parse().unwrap(), d).category;
            if got != *want {
                ok = false;
                wrong.push(format!("{}/{key}: {got} != {want}", e.qualified_name));
            }
        }
        matched += ok as usize;
    }
    ensure(golden.len() == 12 && matched == 12, || format!("golden {matched}/{}: {}", golden.len(), wrong.join("; ")))?;
    Ok(format!(
        "{} records, {} meta, golden 12/12, {:.1}s",
        run.out.records.len(),
        run.out.meta.len(),
        run.took.as_secs_f64()
    ))
}

fn literalist_round_trip(run: &Run) -> Outcome {
    let straight = run.corpus.names_with_tag(FeatureTag::StraightLine);
    ensure(straight.len() >= 5, || format!("only {} straight-line classes", straight.len()))?;
    for c in &straight {
        for v in Variant::ALL {
            let r = run.record(c, v, Builtin::Literalist.name());
            ensure(r.category == Category::StrictlyEquivalent && r.bytecode_identical == Some(true), || {
                format!("{c}/{v}: {}", r.category)
            })?;
        }
    }
    Ok(format!("{}/{} straight-line classes strict under A and B", straight.len(), straight.len()))
}

fn edit_distance_oracle(run: &Run) -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::new_with_rng(PtConfig::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let pair = (small_tree(6), small_tree(6));
    let mut agree = 0;
    for _ in 0..ORACLE_PAIRS {
        let (a, b) = pair.new_tree(&mut runner).unwrap().current();
        ensure(a.size() <= 6 && b.size() <= 6, || "generator exceeded 6 nodes".into())?;
        let s = diff_trees(&a, &b);
        let want = brute_force_distance(&a, &b);
        ensure(s.base_cost == want && s.cost() <= want, || format!("{a} -> {b}: {} vs {want}", s.base_cost))?;
        ensure(s.apply(&a).as_ref() == Ok(&b), || format!("replay {a} -> {b}"))?;
        agree += 1;
    }
    let mut trees = Vec::new();
    for e in &run.corpus.manifest.classes {
        let ast = parse(&run.corpus.sources[&e.qualified_name]).unwrap();
        trees.push((e.qualified_name.clone(), ast.clone(), ast.clone()));
        for v in Variant::ALL {
            let bc = run.bytecode(&e.qualified_name, v);
            for spec in DecompilerSpec::builtins() {
                if let Some(dec) = decompile(&spec, &bc).source().and_then(|t| parse(t).ok()) {
                    trees.push((format!("{}/{v}/{}", e.qualified_name, spec.name), ast.clone(), dec));
                }
            }
        }
    }
    for (name, orig, dec) in &trees {
        let t = class_tree(&normalize_names(orig));
        ensure(diff_trees(&t, &t).cost() == 0, || format!("identity on {name}"))?;
        let (ta, tb, script) = edit_script(orig, dec);
        ensure(script.apply(&ta).as_ref() == Ok(&tb), || format!("replay on {name}"))?;
    }
    within(ORACLE_LIMIT, start.elapsed())?;
    Ok(format!(
        "{agree}/{ORACLE_PAIRS} pairs match exhaustive search, identity and replay on {} corpus pairs, {:.1}s",
        trees.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn foo_distortion(run: &Run) -> Outcome {
    let tcl = run.corpus.names_with_role(Role::TryCatchLoop);
    ensure(tcl.len() == 1, || format!("{} try/catch-loop golden classes", tcl.len()))?;
    let src = &run.corpus.sources[tcl[0]];
    let mut nodes = 0;
    for v in Variant::ALL {
        let bc = compile_source(src, v).unwrap();
        let text = decompile(&DecompilerSpec::builtin(Builtin::Sugarer), &bc).source().map(str::to_string);
        let text = text.ok_or_else(|| format!("sugarer gave no output under {v}"))?;
        let (ta, _, script) = edit_script(&parse(src).unwrap(), &parse(&text).map_err(|_| "unparseable output")?);
        let c = script.counts();
        ensure((c.moves, c.deletes, c.inserts, c.updates) == (1, 2, 0, 0), || {
            format!("{v}: {} moves {} deletes {} inserts {} updates", c.moves, c.deletes, c.inserts, c.updates)
        })?;
        nodes = ta.size();
    }
    Ok(format!("1 move + 2 deletes under A and B, distortion 3/{nodes}"))
}

fn category_of(mode: FailureMode) -> Category {
    match mode {
        FailureMode::EmptyOutput => Category::EmptyOutput,
        FailureMode::SyntacticError => Category::NotRecompilable,
        FailureMode::Deceptive => Category::Deceptive,
    }
}

fn diversity_witnesses(run: &Run) -> Outcome {
    let specs = DecompilerSpec::builtins();
    let mut predicted: BTreeMap<(String, Variant), BTreeMap<String, Expected>> = BTreeMap::new();
    for e in &run.corpus.manifest.classes {
        for v in Variant::ALL {
            let bc = run.bytecode(&e.qualified_name, v);
            let p = specs.iter().map(|s| (s.name.clone(), predict(&bc, s))).collect();
            predicted.insert((e.qualified_name.clone(), v), p);
        }
    }

    let o = overlap(&run.out.records).map_err(|e| e.to_string())?;
    let mut uniques = Vec::new();
    for b in Builtin::ALL {
        let observed: BTreeSet<String> =
            o.successes.iter().filter(|(_, s)| s.len() == 1 && s.contains(b.name())).map(|(k, _)| k.clone()).collect();
        let expected: BTreeSet<String> = predicted
            .iter()
            .filter(|(_, p)| {
                p.iter().filter(|(_, x)| **x == Expected::Succeeds).map(|(n, _)| n.as_str()).eq([b.name()])
            })
            .map(|((c, v), _)| format!("{c}/{v}"))
            .collect();
        ensure(!observed.is_empty(), || format!("{} has no unique success", b.name()))?;
        ensure(observed == expected, || format!("{} unique successes {observed:?} != {expected:?}", b.name()))?;
        uniques.push(format!("{} {}", b.name(), observed.len()));
    }

    let mut fired = 0;
    for b in Builtin::ALL {
        for (shape, mode) in b.failure_profile() {
            let want = Expected::Fails(mode, shape);
            let hits = predicted
                .iter()
                .filter(|(_, p)| p[b.name()] == want)
                .filter(|((c, v), _)| run.record(c, *v, b.name()).category == category_of(mode))
                .count();
            ensure(hits > 0, || format!("{} weakness {shape:?} never fired as {mode:?}", b.name()))?;
            fired += 1;
        }
    }

    let sugarer = Builtin::Sugarer.name();
    let observed: BTreeSet<&str> = run
        .corpus
        .manifest
        .classes
        .iter()
        .map(|e| e.qualified_name.as_str())
        .filter(|c| {
            passes(run.record(c, Variant::A, sugarer).category) && !passes(run.record(c, Variant::B, sugarer).category)
        })
        .collect();
    let expected: BTreeSet<&str> = run
        .corpus
        .manifest
        .classes
        .iter()
        .map(|e| e.qualified_name.as_str())
        .filter(|c| {
            predicted[&(c.to_string(), Variant::A)][sugarer] == Expected::Succeeds
                && predicted[&(c.to_string(), Variant::B)][sugarer] != Expected::Succeeds
        })
        .collect();
    ensure(!observed.is_empty(), || "no A-only sugarer success".into())?;
    ensure(observed == expected, || format!("A-only sugarer successes {observed:?} != {expected:?}"))?;
    Ok(format!(
        "unique successes [{}], {fired} weaknesses fired, {} A-only sugarer classes",
        uniques.join(", "),
        observed.len()
    ))
}

fn meta_recovery(run: &Run) -> Outcome {
    let start = Instant::now();
    let order = DecompilerSpec::builtins();
    let disjoint = run.corpus.names_with_role(Role::Disjoint);
    let same = run.corpus.names_with_role(Role::SameMember);
    ensure(disjoint.len() >= 10 && same.len() >= 3, || {
        format!("{} disjoint, {} same-member", disjoint.len(), same.len())
    })?;
    let mut recovered = 0;
    for c in &disjoint {
        let mut ok = true;
        for v in Variant::ALL {
            let failing = Builtin::ALL.iter().all(|b| !passes(run.record(c, v, b.name()).category));
            let (original, bc) = compile_original(&run.corpus.sources[*c], v).unwrap();
            let res = meta_decompile(&bc, &order, v).unwrap();
            let tests = &run.corpus.tests[*c];
            let src = res.source().map(str::to_string);
            let a =
                assess_output(&original, &bc, v, META, src, tests, &AssessOptions::default(), Instant::now()).unwrap();
            let t = a.record.tests.unwrap_or_default();
            ok &= failing && res.decompilers_used >= 2 && !tests.is_empty() && t.pass == tests.len();
        }
        recovered += ok as usize;
    }
    let mut failed = 0;
    for c in &same {
        let ok = Variant::ALL.iter().all(|&v| {
            let bc = compile_source(&run.corpus.sources[*c], v).unwrap();
            meta_decompile(&bc, &order, v).unwrap().source().is_none()
        });
        failed += ok as usize;
    }
    within(META_LIMIT, start.elapsed())?;
    ensure(recovered == disjoint.len(), || format!("recovered {recovered}/{}", disjoint.len()))?;
    ensure(failed == same.len(), || format!("meta failed on {failed}/{} same-member classes", same.len()))?;
    Ok(format!(
        "recovered {recovered}/{} disjoint classes, failed {failed}/{} same-member classes, {:.1}s",
        disjoint.len(),
        same.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn deceptive_detection(run: &Run) -> Outcome {
    let seeded = run.corpus.names_with_role(Role::Deceptive);
    ensure(seeded.len() == 2, || format!("{} seeded deceptive classes", seeded.len()))?;
    let spec = DecompilerSpec::builtin(Builtin::Optimist);
    let mut timeouts = 0;
    for c in &seeded {
        for v in Variant::ALL {
            let a = assess(&run.corpus.sources[*c], v, &spec, &run.corpus.tests[*c], &AssessOptions::default())
                .map_err(|e| e.to_string())?;
            ensure(a.record.category == Category::Deceptive, || format!("{c}/{v}: {}", a.record.category))?;
            let report = a.report.ok_or_else(|| format!("{c}/{v}: no tests ran"))?;
            if report.verdicts.iter().any(|(_, v)| *v == Verdict::Timeout) {
                timeouts += 1;
            }
        }
    }
    ensure(timeouts == 2, || {
        format!("fuel exhausted in {timeouts} runs, expected the nonterminating class under A and B")
    })?;
    Ok(format!("{} seeded classes Deceptive under A and B, nontermination hits the fuel limit", seeded.len()))
}

fn determinism(run: &Run) -> Outcome {
    let single = full_run(1);
    let a = canonical_json(&run.out);
    let b = canonical_json(&single.out);
    ensure(a == b, || "records differ between --jobs 8 and --jobs 1".into())?;
    let report = |r: &Run| {
        let meta: Vec<_> = r.out.meta.iter().map(|m| m.result.clone()).collect();
        canonical_json(&build_report(&r.all_records(), Some(&meta)).unwrap())
    };
    ensure(report(run) == report(&single), || "reports differ".into())?;
    Ok(format!("--jobs 8 and --jobs 1 give identical canonical JSON ({} bytes)", a.len()))
}

fn thousandths(s: &str) -> Option<u64> {
    let (i, f) = s.split_once('.')?;
    Some(i.parse::<u64>().ok()? * 1000 + f.parse::<u64>().ok()?)
}

/// Invariants every block must satisfy; `cells` is the number of
/// (class, compiler) cells it covers.
fn check_block(b: &Block, cells: usize) -> Result<(), String> {
    let singles: Vec<&SummaryRow> = b.rows.iter().filter(|r| r.decompiler != META).collect();
    for r in b.rows.iter().chain([&b.union, &b.total]) {
        let sum = r.empty_output + r.not_recompilable + r.deceptive + r.equiv_modulo_inputs + r.strictly_equivalent;
        ensure(sum == r.total, || format!("{}: categories sum to {sum}, total {}", r.decompiler, r.total))?;
        ensure(r.pass_tests == r.equiv_modulo_inputs + r.strictly_equivalent, || {
            format!("{}: pass count", r.decompiler)
        })?;
        ensure(r.recompilable == r.pass_tests + r.deceptive, || format!("{}: recompilable count", r.decompiler))?;
        let den = r.deceptive + r.pass_tests;
        if den > 0 {
            let got = thousandths(&r.deceptive_rate).ok_or_else(|| format!("rate {}", r.deceptive_rate))?;
            let exact = 1000.0 * r.deceptive as f64 / den as f64;
            ensure((got as f64 - exact).abs() <= 0.5, || {
                format!("{}: rate {} vs {exact}", r.decompiler, r.deceptive_rate)
            })?;
        }
    }
    for r in b.rows.iter().chain([&b.union]) {
        ensure(r.total == cells, || format!("{}: {} records for {cells} cells", r.decompiler, r.total))?;
    }
    ensure(b.total.total == cells * singles.len(), || "total row size".into())?;
    let max_pass = singles.iter().map(|r| r.pass_tests).max().unwrap_or(0);
    let max_rec = singles.iter().map(|r| r.recompilable).max().unwrap_or(0);
    ensure(b.union.pass_tests >= max_pass && b.union.recompilable >= max_rec, || "union below a backend".into())
}

fn fixture() -> Vec<AssessmentRecord> {
    use Category::*;
    let rows = [
        ("k1", StrictlyEquivalent, StrictlyEquivalent),
        ("k2", EquivModuloInputs, NotRecompilable),
        ("k3", Deceptive, EquivModuloInputs),
        ("k4", EmptyOutput, Deceptive),
        ("k5", NotRecompilable, NotRecompilable),
    ];
    let rec = |class: &str, d: &str, category| AssessmentRecord {
        class: class.into(),
        compiler: Variant::A,
        decompiler: d.into(),
        category,
        distortion: None,
        bytecode_identical: None,
        tests: None,
        elapsed_ms: 0,
    };
    rows.iter().flat_map(|(c, p, q)| [rec(c, "p", *p), rec(c, "q", *q)]).collect()
}

type Tally<'a> = ([usize; 5], &'a str, &'a str, &'a str);

fn tally(r: &SummaryRow) -> Tally<'_> {
    (
        [r.empty_output, r.not_recompilable, r.deceptive, r.equiv_modulo_inputs, r.strictly_equivalent],
        r.recompilable_ratio.as_str(),
        r.pass_tests_ratio.as_str(),
        r.deceptive_rate.as_str(),
    )
}

fn summary_arithmetic(run: &Run) -> Outcome {
    // Hand tally of the fixture: counts are [empty, not-recompilable,
    // deceptive, equiv-modulo-inputs, strict], then recompilable ratio,
    // pass ratio, deceptive rate.
    let t = summarize(&fixture()).map_err(|e| e.to_string())?;
    let b = &t.overall;
    let want_p = ([1, 1, 1, 1, 1], "0.600", "0.400", "0.333");
    let want_q = ([0, 2, 1, 1, 1], "0.600", "0.400", "0.333");
    let want_union = ([0, 1, 1, 2, 1], "0.800", "0.600", "0.250");
    let want_total = ([1, 3, 2, 2, 2], "0.600", "0.400", "0.333");
    ensure(tally(&b.rows[0]) == want_p, || format!("p: {:?}", tally(&b.rows[0])))?;
    ensure(tally(&b.rows[1]) == want_q, || format!("q: {:?}", tally(&b.rows[1])))?;
    ensure(tally(&b.union) == want_union, || format!("union: {:?}", tally(&b.union)))?;
    ensure(tally(&b.total) == want_total, || format!("total: {:?}", tally(&b.total)))?;
    check_block(b, 5)?;
    let o = overlap(&fixture()).map_err(|e| e.to_string())?;
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    ensure(o.all_fail == set(&["k4/A", "k5/A"]) && o.all_success == set(&["k1/A"]), || format!("{o:?}"))?;
    ensure(o.unique_success == [("p".to_string(), 1), ("q".to_string(), 1)].into(), || format!("{o:?}"))?;

    let records = run.all_records();
    let t = summarize(&records).map_err(|e| e.to_string())?;
    let n = run.corpus.manifest.classes.len();
    check_block(&t.overall, n * 2)?;
    for b in t.by_compiler.values() {
        check_block(b, n)?;
    }
    let any_pass = run
        .corpus
        .manifest
        .classes
        .iter()
        .flat_map(|e| Variant::ALL.map(|v| (e.qualified_name.clone(), v)))
        .filter(|(c, v)| Builtin::ALL.iter().any(|b| passes(run.record(c, *v, b.name()).category)))
        .count();
    ensure(t.overall.union.pass_tests == any_pass, || {
        format!("union pass {} vs {any_pass}", t.overall.union.pass_tests)
    })?;
    let m = t.meta.as_ref().ok_or("no meta comparison")?;
    ensure(m.meta_pass_tests >= m.best_single_pass_tests, || format!("{m:?}"))?;
    Ok(format!(
        "fixture matches hand tally; real run conserves {} cells, union pass {}, meta {} >= {} {}",
        n * 2,
        any_pass,
        m.meta_pass_tests,
        m.best_single,
        m.best_single_pass_tests
    ))
}

fn main() {
    let run = full_run(8);
    let criteria: [Criterion; 9] = [
        ("pipeline totality", pipeline_totality),
        ("literalist round-trip", literalist_round_trip),
        ("edit-distance oracle", edit_distance_oracle),
        ("Foo analog distortion", foo_distortion),
        ("diversity witnesses", diversity_witnesses),
        ("meta recovery", meta_recovery),
        ("deceptive detection", deceptive_detection),
        ("determinism", determinism),
        ("summary arithmetic", summary_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(|| check(&run)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match result {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
