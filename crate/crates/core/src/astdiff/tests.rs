use super::*;
use crate::compiler::{compile_source, Variant};
use crate::decomp::{decompile_builtin, Builtin};
use crate::lang::parse;

fn t(label: &str, kids: Vec<Tree>) -> Tree {
    Tree::node(label, kids)
}

fn l(label: &str) -> Tree {
    Tree::leaf(label)
}

fn decompiled(b: Builtin, src: &str) -> ClassAst {
    let bc = compile_source(src, Variant::A).unwrap();
    parse(&decompile_builtin(b, &bc, false).unwrap()).unwrap()
}

#[test]
fn identity_costs_nothing() {
    let a = t("r", vec![t("a", vec![l("b"), l("c")]), l("d")]);
    let s = diff_trees(&a, &a);
    assert_eq!(s.cost(), 0);
    assert_eq!(s.apply(&a).unwrap(), a);
}

#[test]
fn textbook_example() {
    // f(d(a, c(b)), e) -> f(c(d(a, b)), e): cost 2.
    let a = t("f", vec![t("d", vec![l("a"), t("c", vec![l("b")])]), l("e")]);
    let b = t("f", vec![t("c", vec![t("d", vec![l("a"), l("b")])]), l("e")]);
    let s = diff_trees(&a, &b);
    assert_eq!(s.base_cost, 2);
    assert_eq!(s.apply(&a).unwrap(), b);
}

#[test]
fn swapped_leaves_become_a_move() {
    let a = t("r", vec![l("x"), t("y", vec![l("z")])]);
    let b = t("r", vec![t("y", vec![l("z")]), l("x")]);
    let s = diff_trees(&a, &b);
    assert_eq!(s.base_cost, 2);
    assert_eq!(s.counts(), EditCounts { moves: 1, ..Default::default() });
    assert_eq!(s.apply(&a).unwrap(), b);
}

#[test]
fn root_replacement_replays() {
    let a = t("a", vec![l("x"), l("y")]);
    let b = t("b", vec![t("c", vec![l("x")]), l("y")]);
    let s = diff_trees(&a, &b);
    assert_eq!(s.apply(&a).unwrap(), b);
}

#[test]
fn normalization_renames_locals_and_params_only() {
    let src = "class C { int n; int f(int a) { int b = a + n; { int c = b; } { int c = 2; } try { print(c2()); } catch (RuntimeException e) { print(e); } return b; } int c2() { return 1; } }";
    let norm = normalize_names(&parse(src).unwrap());
    let text = crate::lang::pretty_print(&norm);
    assert!(text.contains("int f(int p0)"), "{text}");
    assert!(text.contains("int l0 = p0 + n;"), "{text}");
    assert!(text.contains("int l1 = l0;") && text.contains("int l2 = 2;"), "{text}");
    assert!(text.contains("catch (RuntimeException l3)") && text.contains("print(l3)"), "{text}");
    assert!(text.contains("c2()") && text.contains("int n;"), "{text}");
}

#[test]
fn renaming_alone_is_free() {
    let a = parse("class C { static int f(int x) { int y = x * 2; return y; } }").unwrap();
    let b = parse("class C { static int f(int q) { int r0 = q * 2; return r0; } }").unwrap();
    assert_eq!(distortion(&a, &b).edits, 0);
}

#[test]
fn deleting_a_statement_costs() {
    let a = parse("class C { static void f() { print(1); print(2); } }").unwrap();
    let b = parse("class C { static void f() { print(1); } }").unwrap();
    assert!(distortion(&a, &b).edits >= 1);
}

#[test]
fn foo_under_sugarer_is_one_move_two_deletes() {
    let src = "class Foo {
        static int f(int j) {
            int i = 0;
            while (true) {
                try {
                    while (i < j) { i = i + 1; if (i == 3) { int z = 1 / 0; } }
                } catch (RuntimeException re) { i = 10; continue; }
                break;
            }
            return i;
        }
    }";
    let original = parse(src).unwrap();
    let (a, b, s) = edit_script(&original, &decompiled(Builtin::Sugarer, src));
    assert_eq!(s.counts(), EditCounts { moves: 1, deletes: 2, ..Default::default() }, "{s:#?}");
    assert_eq!(s.apply(&a).unwrap(), b);
}

#[test]
fn concat_sugar_lowers_distortion() {
    let src = "class S { static str g(int a, str b) { str c = a + b + \"!\"; print(c); return c; } }";
    let original = parse(src).unwrap();
    let lit = distortion(&original, &decompiled(Builtin::Literalist, src));
    let sug = distortion(&original, &decompiled(Builtin::Sugarer, src));
    assert!(lit.normalized > sug.normalized, "{lit:?} vs {sug:?}");
}

#[test]
fn unparseable_output_has_no_distortion() {
    assert!(distortion_of_sources("class C {}", "class C {").is_none());
    assert_eq!(distortion_of_sources("class C {}", "class C {}").unwrap().edits, 0);
}
