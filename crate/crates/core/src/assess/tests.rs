use super::*;
use crate::decomp::Builtin;
use crate::vm::testcase::Arg;
use crate::vm::Program;

/// Tests whose expectations are taken from running the original.
fn tests_from(src: &str, calls: &[(&str, Vec<Arg>)]) -> Vec<TestCase> {
    let bc = compile_source(src, Variant::A).unwrap();
    let prog = Program::load(&[&bc]);
    calls
        .iter()
        .enumerate()
        .map(|(i, (entry, args))| {
            let obs = prog.run(entry, args, DEFAULT_FUEL);
            let outcome = match obs.status {
                crate::vm::interp::RunStatus::Completed(o) => o,
                s => panic!("{s:?}"),
            };
            TestCase {
                id: format!("t{i}"),
                entry: entry.to_string(),
                args: args.clone(),
                expected_stdout: obs.stdout,
                expected_outcome: outcome,
            }
        })
        .collect()
}

fn category(src: &str, v: Variant, b: Builtin, tests: &[TestCase]) -> AssessmentRecord {
    assess(src, v, &DecompilerSpec::builtin(b), tests, &AssessOptions::default()).unwrap().record
}

const SETTER: &str = "class C { static int count; static void setCount(int count) { C.count = count; } static void main() { setCount(5); print(C.count); } }";

#[test]
fn pipeline_categories() {
    let straight = "class S { static int f(int a, int b) { int c = a * b; return c - a; } }";
    let t = tests_from(straight, &[("S.f(int,int)", vec![Arg::Int(3), Arg::Int(4)])]);
    let r = category(straight, Variant::A, Builtin::Literalist, &t);
    assert_eq!(r.category, Category::StrictlyEquivalent);
    assert_eq!(r.bytecode_identical, Some(true));
    assert_eq!(r.tests, Some(TestCounts { pass: 1, fail: 0, timeout: 0 }));

    let t = tests_from(SETTER, &[("C.main()", vec![])]);
    let r = category(SETTER, Variant::A, Builtin::Optimist, &t);
    assert_eq!(r.category, Category::Deceptive);
    assert_eq!(r.tests.unwrap().fail, 1);
    assert!(r.distortion.is_some());

    let wrapper = "class S { static class In { private int v; private In(int v) { this.v = v; } } static int f() { In i = new In(9); return i.v; } }";
    let r = category(wrapper, Variant::B, Builtin::Sugarer, &[]);
    assert_eq!(r.category, Category::NotRecompilable);
    assert!(r.distortion.is_some() && r.bytecode_identical.is_none() && r.tests.is_none());

    let foo = "class Foo { static int f(int j) { int i = 0; while (true) { try { i = 10 / j; } catch (RuntimeException e) { j = 1; continue; } break; } return i; } }";
    let r = category(foo, Variant::A, Builtin::Literalist, &[]);
    assert_eq!(r.category, Category::EmptyOutput);
    assert!(r.distortion.is_none());
}

#[test]
fn reversed_branches_are_equivalent_modulo_inputs() {
    let src = "class P { static int f(int a) { int r = 0; if (a < 3) { r = 1; } else { r = 2; } return r; } }";
    let t = tests_from(src, &[("P.f(int)", vec![Arg::Int(1)]), ("P.f(int)", vec![Arg::Int(5)])]);
    let cats: Vec<Category> = Variant::ALL.iter().map(|&v| category(src, v, Builtin::Sugarer, &t).category).collect();
    assert!(cats.contains(&Category::EquivModuloInputs), "{cats:?}");
}

#[test]
fn timeout_counts_as_failure() {
    let t = TestCounts { pass: 3, fail: 0, timeout: 1 };
    let s = Stages { output_empty: false, recompiled: true, bytecode_identical: Some(false), tests: Some(t) };
    assert_eq!(classify(&s), Ok(Category::Deceptive));
}

#[test]
fn classify_rejects_inconsistent_stages() {
    let base = Stages { output_empty: false, recompiled: false, bytecode_identical: None, tests: None };
    assert_eq!(
        classify(&Stages { output_empty: true, recompiled: true, ..base }),
        Err(ClassifyError::EmptyWithResults)
    );
    assert_eq!(classify(&Stages { bytecode_identical: Some(true), ..base }), Err(ClassifyError::BytecodeStage));
    assert_eq!(classify(&Stages { recompiled: true, ..base }), Err(ClassifyError::BytecodeStage));
    assert_eq!(
        classify(&Stages { tests: Some(TestCounts::default()), ..base }),
        Err(ClassifyError::TestsWithoutRecompile)
    );
    assert_eq!(
        classify(&Stages { recompiled: true, bytecode_identical: Some(false), ..base }),
        Ok(Category::EquivModuloInputs)
    );
}

#[test]
fn scratch_directory_holds_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let opts = AssessOptions { scratch: Some(dir.path().join("C/A/optimist")), ..Default::default() };
    assess(SETTER, Variant::A, &DecompilerSpec::builtin(Builtin::Optimist), &[], &opts).unwrap();
    for f in ["original.mjc", "decompiled.mj", "recompiled.mjc", "record.json"] {
        assert!(dir.path().join("C/A/optimist").join(f).exists(), "{f}");
    }
}
