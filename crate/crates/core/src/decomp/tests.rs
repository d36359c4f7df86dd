use super::*;
use crate::compiler::{compile_source, recompile_check, Variant};
use crate::vm::testcase::Arg;
use crate::vm::{bytecode_equal, Program, DEFAULT_FUEL};

fn build(src: &str, v: Variant) -> BytecodeClass {
    compile_source(src, v).unwrap_or_else(|d| panic!("{d:?}"))
}

fn out(b: Builtin, src: &str, v: Variant) -> String {
    decompile_builtin(b, &build(src, v), false).unwrap_or_else(|| panic!("{} gave up", b.name()))
}

fn run(src: &str, v: Variant, entry: &str, args: &[Arg]) -> String {
    let bc = build(src, v);
    Program::load(&[&bc]).run(entry, args, DEFAULT_FUEL).stdout
}

const STRAIGHT: &[&str] = &[
    "class S { static int f(int a, int b) { int c = a * b; int d = c - a; return d % 7; } }",
    "class S { int x; S(int x) { this.x = x; } int get() { return x + 1; } static void main() { S s = new S(3); print(s.get()); } }",
    "class S { static str g(int a, str b) { str c = a + b + \"!\"; print(c); return c; } }",
    "class S { static final int K = -4; static int n = 2; static { n = n + K; } static void h() { print(S.n); return; } }",
    "class S { static class In { private int v; private In(int v) { this.v = v; } } static int f() { In i = new In(9); return i.v; } }",
    "class S { static bool p(int a) { bool b = a < 3; return !b; } static void q() { print(p(1)); print(true); } }",
];

#[test]
fn literalist_round_trip_is_strict() {
    for src in STRAIGHT {
        for v in Variant::ALL {
            let bc = build(src, v);
            let text = decompile_builtin(Builtin::Literalist, &bc, false).expect("decompiled");
            let re = compile_source(&text, v).unwrap_or_else(|d| panic!("{text}\n{d:?}"));
            if let Err(d) = bytecode_equal(&bc, &re) {
                panic!("{v}: {text}\n{d}");
            }
        }
    }
}

#[test]
fn other_backends_recompile_straight_line_code() {
    for src in STRAIGHT {
        for v in Variant::ALL {
            for b in [Builtin::Sugarer, Builtin::Optimist] {
                let text = out(b, src, v);
                if v == Variant::B && b == Builtin::Sugarer && src.contains("private In") {
                    assert!(recompile_check(&text, v).is_err());
                    continue;
                }
                recompile_check(&text, v).unwrap_or_else(|d| panic!("{} {v}\n{text}\n{d:?}", b.name()));
            }
        }
    }
}

#[test]
fn concat_idiom() {
    let src = STRAIGHT[2];
    let lit = out(Builtin::Literalist, src, Variant::A);
    assert!(lit.contains("new StringBuilder().append(a).append(b)"), "{lit}");
    assert!(lit.contains("str r2 ="), "{lit}");
    let sug = out(Builtin::Sugarer, src, Variant::A);
    assert!(sug.contains("a + b + \"!\""), "{sug}");
    assert!(!sug.contains("StringBuilder"), "{sug}");
}

#[test]
fn optimist_confuses_param_and_static_field() {
    let src = "class C { static int count; static void setCount(int count) { C.count = count; } static void main() { setCount(5); print(C.count); } }";
    let text = out(Builtin::Optimist, src, Variant::A);
    assert!(text.contains("count = count;"), "{text}");
    assert_eq!(run(src, Variant::A, "C.main()", &[]), "5\n");
    assert_eq!(run(&text, Variant::A, "C.main()", &[]), "0\n");
    assert!(shapes::detect(Shape::StaticSetterShadow, &build(src, Variant::A)).contains("C.setCount(int)"));
}

#[test]
fn overload_cast_elision_changes_target() {
    let src = "class C { static str f(Object o) { return \"obj\"; } static str f(str s) { return \"str\"; }
        static void main() { print(f((Object) \"a\")); } }";
    let bc = build(src, Variant::A);
    assert!(shapes::detect(Shape::OverloadCastElision, &bc).contains("C.main()"));
    let text = out(Builtin::Optimist, src, Variant::A);
    assert_eq!(run(&text, Variant::A, "C.main()", &[]), "str\n");
    let text = out(Builtin::Sugarer, src, Variant::A);
    assert_eq!(run(&text, Variant::A, "C.main()", &[]), "obj\n");
}

#[test]
fn wrapper_variants() {
    let src = STRAIGHT[4];
    let a = build(src, Variant::A);
    let b = build(src, Variant::B);
    assert!(shapes::detect(Shape::VariantBWrapperCall, &a).is_empty());
    assert!(!shapes::detect(Shape::VariantBWrapperCall, &b).is_empty());
    let text = out(Builtin::Sugarer, src, Variant::B);
    let err = recompile_check(&text, Variant::B).unwrap_err();
    assert!(err[0].message.contains("no applicable constructor"), "{err:?}");
}

#[test]
fn foo_loop_is_rewritten_by_sugarer() {
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
    let bc = build(src, Variant::A);
    assert!(decompile_builtin(Builtin::Literalist, &bc, false).is_none());
    assert!(!shapes::detect(Shape::HandlerInLoop, &bc).is_empty());
    let text = out(Builtin::Sugarer, src, Variant::A);
    assert!(!text.contains("break") && !text.contains("continue"), "{text}");
    for j in [2, 5] {
        assert_eq!(
            run(&text, Variant::A, "Foo.f(int)", &[Arg::Int(j)]),
            run(src, Variant::A, "Foo.f(int)", &[Arg::Int(j)])
        );
    }
}

#[test]
fn bool_literal_local_breaks_sugarer() {
    let src = "class C { static int f(int a) { bool seen = false; if (a > 2) { seen = true; } if (seen) { return 1; } return 0; } }";
    let bc = build(src, Variant::A);
    assert!(!shapes::detect(Shape::BoolLiteralLocal, &bc).is_empty());
    assert!(recompile_check(&out(Builtin::Sugarer, src, Variant::A), Variant::A).is_err());
    assert!(recompile_check(&out(Builtin::Literalist, src, Variant::A), Variant::A).is_ok());
    assert!(recompile_check(&out(Builtin::Optimist, src, Variant::A), Variant::A).is_ok());
}

#[test]
fn foreign_static_call_breaks_optimist() {
    let src = "class C { static class H { static int twice(int x) { return x * 2; } } static int f() { return H.twice(4); } }";
    let bc = build(src, Variant::A);
    assert_eq!(shapes::detect(Shape::ForeignStaticCall, &bc).into_iter().collect::<Vec<_>>(), ["C.f()"]);
    assert!(recompile_check(&out(Builtin::Optimist, src, Variant::A), Variant::A).is_err());
    assert!(recompile_check(&out(Builtin::Sugarer, src, Variant::A), Variant::A).is_ok());
}

#[test]
fn multiline_string_breaks_literalist() {
    let src = "class C { static void f() { print(\"a\\nb\"); } }";
    let bc = build(src, Variant::A);
    assert!(!shapes::detect(Shape::MultilineString, &bc).is_empty());
    assert!(recompile_check(&out(Builtin::Literalist, src, Variant::A), Variant::A).is_err());
    assert!(recompile_check(&out(Builtin::Sugarer, src, Variant::A), Variant::A).is_ok());
}

#[test]
fn external_adapter_protocol() {
    let bc = build("class E {}", Variant::A);
    let ok = DecompilerSpec::external("cat", "echo 'class E {}'; test -s {input}", 5);
    assert_eq!(decompile(&ok, &bc).source(), Some("class E {}\n"));
    for cmd in ["exit 3", "true", "sleep 5"] {
        let spec = DecompilerSpec::external("x", cmd, 1);
        assert_eq!(decompile(&spec, &bc).status, DecompStatus::Empty, "{cmd}");
    }
}
