use super::*;
use crate::decomp::Builtin;

fn build(src: &str) -> BytecodeClass {
    compile_source(src, Variant::A).unwrap()
}

fn order(bs: &[Builtin]) -> Vec<DecompilerSpec> {
    bs.iter().map(|&b| DecompilerSpec::builtin(b)).collect()
}

const LSO: [Builtin; 3] = [Builtin::Literalist, Builtin::Sugarer, Builtin::Optimist];

fn origins(r: &MetaResult) -> BTreeMap<String, String> {
    r.provenance.iter().map(|(k, v)| (k.0.clone(), v.clone())).collect()
}

#[test]
fn first_decompiler_suffices() {
    let r =
        meta_decompile(&build("class C { static int f(int a) { return a + 1; } }"), &order(&LSO), Variant::A).unwrap();
    assert!(r.source().is_some());
    assert_eq!(r.decompilers_used, 1);
    assert_eq!(r.invocations, ["literalist"]);
}

#[test]
fn disjoint_errors_merge() {
    let src = "class C {
        static void show() { print(\"a\\nb\"); }
        static int flag(int a) { bool seen = false; if (a > 2) { seen = true; } if (seen) { return 1; } return 0; }
    }";
    let r = meta_decompile(&build(src), &order(&LSO), Variant::A).unwrap();
    let text = r.source().expect("merged");
    assert!(recompile_check(text));
    assert_eq!(r.invocations, ["literalist", "sugarer"]);
    let o = origins(&r);
    assert_eq!(o["C.show()"], "sugarer");
    assert_eq!(o["C.flag(int)"], "literalist");
    assert_eq!(r.decompilers_used, 2);
}

fn recompile_check(text: &str) -> bool {
    crate::compiler::recompile_check(text, Variant::A).is_ok()
}

#[test]
fn constant_field_transplant() {
    let src = "class a.Yaml { static final str BLANK_CONFIG = \"{}\\n\"; static int size() { return 2; } }";
    let bc = build(src);
    let lit = decompile(&DecompilerSpec::builtin(Builtin::Literalist), &bc).source().unwrap().to_string();
    let sol = solution_from(&lit, "literalist", Variant::A).unwrap().unwrap();
    let errored: Vec<String> =
        sol.ast.members.iter().filter(|m| m.errored).map(|m| member_signature(m, &sol.ast).0).collect();
    assert_eq!(errored, ["a.Yaml#BLANK_CONFIG"]);
    let r = meta_decompile(&bc, &order(&[Builtin::Literalist, Builtin::Optimist]), Variant::A).unwrap();
    assert_eq!(origins(&r)["a.Yaml#BLANK_CONFIG"], "optimist");
    assert_eq!(origins(&r)["a.Yaml.size()"], "literalist");
}

#[test]
fn two_donors() {
    let src = "class C {
        static class H { static int twice(int x) { return x * 2; } }
        static int plain(int a) { return a - 1; }
        static int m1() { return H.twice(1); }
        static void m2() { print(\"x\\ny\"); print(H.twice(2)); }
    }";
    let r =
        meta_decompile(&build(src), &order(&[Builtin::Optimist, Builtin::Literalist, Builtin::Sugarer]), Variant::A)
            .unwrap();
    assert!(r.source().is_some());
    let o = origins(&r);
    assert_eq!(o["C.plain(int)"], "optimist");
    assert_eq!(o["C.m1()"], "literalist");
    assert_eq!(o["C.m2()"], "sugarer");
    assert_eq!(r.decompilers_used, 3);
}

#[test]
fn shared_failure_is_not_completable() {
    let src = "class C {
        static class H { static int twice(int x) { return x * 2; } }
        static int bad(int a) { print(\"p\\nq\"); bool s = false; if (a > H.twice(1)) { s = true; } if (s) { return 1; } return 0; }
        static int ok() { return 3; }
    }";
    let r = meta_decompile(&build(src), &order(&LSO), Variant::A).unwrap();
    assert_eq!(r.status, MetaStatus::Failure);
    assert_eq!(r.invocations.len(), 3);
}

#[test]
fn unparseable_output_contributes_nothing() {
    let bc = build("class C { static int f() { return 1; } }");
    let junk = DecompilerSpec::external("junk", "echo 'class {'", 5);
    let r = meta_decompile(&bc, &[junk, DecompilerSpec::builtin(Builtin::Optimist)], Variant::A).unwrap();
    assert_eq!(r.invocations, ["junk", "optimist"]);
    assert!(r.provenance.values().all(|o| o == "optimist"));
}

struct RejectFirst(std::cell::Cell<bool>);

impl Oracle for RejectFirst {
    fn accept(&self, source: &str, compiler: Variant) -> bool {
        if self.0.replace(false) {
            return false;
        }
        RecompileOracle.accept(source, compiler)
    }
}

#[test]
fn rejected_solution_is_dropped() {
    let bc = build("class C { static int f() { return 1; } }");
    let r = meta_decompile_with(&bc, &order(&LSO), Variant::A, &RejectFirst(true.into())).unwrap();
    assert_eq!(r.rejected, ["literalist"]);
    assert_eq!(r.invocations, ["literalist", "sugarer"]);
    assert!(r.provenance.values().all(|o| o == "sugarer"));
}

#[test]
fn store_keeps_first_writer_and_refuses_errors() {
    let ast = parse("class C { int x; int y; }").unwrap();
    let mut store = FragmentStore::default();
    let mut a = ast.members[0].clone();
    a.origin = "one".into();
    let sig = member_signature(&a, &ast);
    assert!(store.offer(sig.clone(), &a));
    let mut b = a.clone();
    b.origin = "two".into();
    assert!(!store.offer(sig.clone(), &b));
    assert_eq!(store.get(&sig).unwrap().origin, "one");
    let mut e = ast.members[1].clone();
    e.errored = true;
    assert!(!store.offer(member_signature(&e, &ast), &e));
    assert_eq!(store.len(), 1);
}
