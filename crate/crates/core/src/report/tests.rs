use super::*;
use crate::assess::Category::*;

fn rec(class: &str, v: Variant, d: &str, category: Category) -> AssessmentRecord {
    AssessmentRecord {
        class: class.into(),
        compiler: v,
        decompiler: d.into(),
        category,
        distortion: None,
        bytecode_identical: None,
        tests: None,
        elapsed_ms: 0,
    }
}

#[test]
fn ratios_round_half_up() {
    assert_eq!(ratio(2, 3), "0.667");
    assert_eq!(ratio(1, 16), "0.063");
    assert_eq!(ratio(5, 5), "1.000");
    assert_eq!(ratio(0, 7), "0.000");
    assert_eq!(ratio(1, 0), "n/a");
}

#[test]
fn all_passing_records() {
    let mut rs = Vec::new();
    for c in ["x", "y"] {
        for d in ["p", "q"] {
            rs.push(rec(c, Variant::A, d, StrictlyEquivalent));
        }
    }
    let t = summarize(&rs).unwrap();
    for r in t.overall.rows.iter().chain([&t.overall.union]) {
        assert_eq!((r.recompilable_ratio.as_str(), r.pass_tests_ratio.as_str()), ("1.000", "1.000"));
        assert_eq!(r.deceptive_rate, "0.000");
    }
    assert_eq!(t.overall.total.total, 4);
    assert!(t.meta.is_none());
}

#[test]
fn union_takes_best_backend_per_cell() {
    let rs = vec![
        rec("x", Variant::A, "p", Deceptive),
        rec("x", Variant::A, "q", NotRecompilable),
        rec("y", Variant::A, "p", EmptyOutput),
        rec("y", Variant::A, "q", EquivModuloInputs),
    ];
    let u = summarize(&rs).unwrap().overall.union;
    assert_eq!((u.deceptive, u.equiv_modulo_inputs, u.total), (1, 1, 2));
    assert_eq!(u.deceptive_rate, "0.500");
}

#[test]
fn missing_and_duplicate_cells_are_errors() {
    let rs = vec![rec("x", Variant::A, "p", Deceptive), rec("y", Variant::A, "q", Deceptive)];
    assert_eq!(summarize(&rs), Err(ReportError::MissingCells(vec!["x/A/q".into(), "y/A/p".into()])));
    let rs = vec![rec("x", Variant::A, "p", Deceptive), rec("x", Variant::A, "p", Deceptive)];
    assert!(matches!(summarize(&rs), Err(ReportError::Duplicate(_))));
    assert_eq!(overlap(&[]), Err(ReportError::Empty));
}

#[test]
fn disjoint_successes_are_unique() {
    let ds = ["p", "q", "r"];
    let mut rs = Vec::new();
    for (i, c) in ["x", "y", "z", "w"].iter().enumerate() {
        for (j, d) in ds.iter().enumerate() {
            rs.push(rec(c, Variant::B, d, if i % 3 == j { StrictlyEquivalent } else { NotRecompilable }));
        }
    }
    let o = overlap(&rs).unwrap();
    assert_eq!(o.unique_success.values().sum::<usize>(), 4);
    assert_eq!(o.unique_success["p"], 2);
    assert!(o.all_success.is_empty() && o.all_fail.is_empty());
    assert!(o.meta_recovered.is_none());
}

#[test]
fn meta_recovery_counts_only_all_fail_cells() {
    let rs = vec![
        rec("x", Variant::A, "p", NotRecompilable),
        rec("x", Variant::A, META, EquivModuloInputs),
        rec("y", Variant::A, "p", StrictlyEquivalent),
        rec("y", Variant::A, META, StrictlyEquivalent),
        rec("z", Variant::A, "p", EmptyOutput),
        rec("z", Variant::A, META, EmptyOutput),
    ];
    let o = overlap(&rs).unwrap();
    assert_eq!(o.all_fail, ["x/A".to_string(), "z/A".to_string()].into());
    assert_eq!(o.meta_recovered, Some(["x/A".to_string()].into()));
    let t = summarize(&rs).unwrap();
    assert_eq!(t.overall.total.total, 3);
    let m = t.meta.unwrap();
    assert_eq!((m.meta_pass_tests, m.best_single.as_str(), m.best_single_pass_tests), (2, "p", 1));
}

#[test]
fn provenance_histograms() {
    use crate::lang::MemberSignature;
    use crate::meta::MetaStatus;
    let res = |origins: &[&str]| MetaResult {
        status: MetaStatus::Success(String::new()),
        provenance: origins
            .iter()
            .enumerate()
            .map(|(i, o)| (MemberSignature(format!("C.m{i}()")), o.to_string()))
            .collect(),
        decompilers_used: origins.iter().collect::<BTreeSet<_>>().len(),
        invocations: vec![],
        rejected: vec![],
    };
    let fail = MetaResult { status: MetaStatus::Failure, ..res(&[]) };
    let all = [res(&["a", "a"]), res(&["a", "b", "b"]), fail];
    let s = provenance_stats(&all);
    assert_eq!((s.merged, s.failed), (2, 1));
    assert_eq!(s.decompilers_used, [(1, 1), (2, 1)].into());
    assert_eq!(s.fragment_origins, [("a".to_string(), 3), ("b".to_string(), 2)].into());
    assert_eq!(s.origin_sets, [("a".to_string(), 1), ("a+b".to_string(), 1)].into());
}

#[test]
fn csv_has_a_line_per_row() {
    let rs = vec![rec("x", Variant::A, "p", Deceptive), rec("x", Variant::B, "p", StrictlyEquivalent)];
    let csv = summary_csv(&summarize(&rs).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines[0].starts_with("scope,decompiler,total"));
    assert_eq!(lines[1], "all,p,2,0,0,1,0,1,2,1.000,1,0.500,0.500");
}
