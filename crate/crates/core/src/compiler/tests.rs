use super::*;
use crate::vm::interp::RunStatus;
use crate::vm::testcase::Arg;

fn build(src: &str, v: Variant) -> BytecodeClass {
    let bc = compile_source(src, v).unwrap_or_else(|d| panic!("{d:?}"));
    verify(&bc).unwrap_or_else(|e| panic!("{e:?}\n{}", to_text(&bc)));
    bc
}

fn run(src: &str, v: Variant, entry: &str, args: &[Arg]) -> (String, RunStatus) {
    let bc = build(src, v);
    let o = Program::load(&[&bc]).run(entry, args, DEFAULT_FUEL);
    (o.stdout, o.status)
}

fn errors(src: &str) -> Vec<String> {
    compile_source(src, Variant::A).unwrap_err().into_iter().map(|d| d.message).collect()
}

#[test]
fn empty_class_gets_default_ctor() {
    let bc = build("class A {}", Variant::A);
    assert_eq!(bc.methods.len(), 1);
    let m = &bc.methods[0];
    assert!(m.is_ctor() && m.params.is_empty() && m.flags.synthetic);
    assert_eq!(m.code.len(), 3);
}

#[test]
fn concat_shapes_differ_by_variant() {
    let src = "class U { static str f(int a, str b) { return a + b + 1; } }";
    let a = build(src, Variant::A);
    let b = build(src, Variant::B);
    let names = |bc: &BytecodeClass| -> Vec<&str> { bc.methods[1].code.iter().map(|i| i.mnemonic()).collect() };
    assert_eq!(
        names(&a),
        [
            "BUILDER_NEW",
            "ILOAD",
            "BUILDER_APPEND",
            "ALOAD",
            "BUILDER_APPEND",
            "ICONST",
            "BUILDER_APPEND",
            "BUILDER_STR",
            "ARETURN"
        ]
    );
    assert_eq!(names(&b), ["ILOAD", "ALOAD", "CONCAT", "ICONST", "CONCAT", "ARETURN"]);
    for v in Variant::ALL {
        let (out, st) = run(src, v, "U.f(int,str)", &[Arg::Int(4), Arg::Str("x".into())]);
        assert_eq!(out, "4x1\n");
        assert_eq!(st, RunStatus::Completed(Outcome::Normal));
    }
}

#[test]
fn arithmetic_before_concat() {
    let src = "class U { static void main() { print(1 + 2 + \"a\" + 1 + 2); } }";
    for v in Variant::ALL {
        assert_eq!(run(src, v, "U.main()", &[]).0, "3a12\n");
    }
}

#[test]
fn digit_count_loop() {
    let src = "class Utils {
        static int digits(int n, int base) {
            int count = 0;
            while (n != 0) { n = n / base; count = count + 1; }
            return count;
        }
        static void main() { print(digits(65535, 2)); }
    }";
    for v in Variant::ALL {
        assert_eq!(run(src, v, "Utils.main()", &[]).0, "16\n");
    }
}

#[test]
fn if_else_polarity() {
    let src = "class P { static int f(int x) { if (x < 0) { return 1; } else { return 2; } } }";
    let a = build(src, Variant::A);
    let b = build(src, Variant::B);
    assert!(matches!(a.methods[1].code[3], Insn::IfEq(_)));
    assert!(matches!(b.methods[1].code[3], Insn::IfNe(_)));
    for v in Variant::ALL {
        assert_eq!(run(src, v, "P.f(int)", &[Arg::Int(-3)]).0, "1\n");
        assert_eq!(run(src, v, "P.f(int)", &[Arg::Int(3)]).0, "2\n");
    }
}

#[test]
fn private_nested_ctor_wrappers() {
    let src = "class O {
        static class N { int v; private N(int v) { this.v = v; } }
        static int f() { N n = new N(7); return n.v; }
    }";
    let a = build(src, Variant::A);
    let b = build(src, Variant::B);
    assert_eq!(a.inners.len(), 2);
    assert_eq!(a.inners[1].name, "O$1");
    assert!(a.inners[1].flags.synthetic);
    let wa = a.inners[0].methods.iter().find(|m| m.flags.synthetic).unwrap();
    assert_eq!(wa.params, vec![Type::Int, Type::Class("O$1".into())]);
    assert_eq!(b.inners.len(), 1);
    let wb = b.inners[0].methods.iter().find(|m| m.flags.synthetic).unwrap();
    assert_eq!(wb.params, vec![Type::Int, Type::Class("O.N".into())]);
    for v in Variant::ALL {
        assert_eq!(run(src, v, "O.f()", &[]).0, "7\n");
    }
}

#[test]
fn try_catch_and_loops() {
    let src = "class T {
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
    for v in Variant::ALL {
        assert_eq!(run(src, v, "T.f(int)", &[Arg::Int(2)]).0, "2\n");
        assert_eq!(run(src, v, "T.f(int)", &[Arg::Int(5)]).0, "10\n");
    }
}

#[test]
fn statics_constants_and_clinit() {
    let src = "class S {
        static final int K = 5;
        static int count = K * 2;
        static { count = count + 1; }
        static void main() { print(count + K); }
    }";
    let bc = build(src, Variant::A);
    assert_eq!(bc.fields[0].constant, Some(ConstValue::Int(5)));
    assert!(bc.methods.last().unwrap().is_clinit());
    assert_eq!(run(src, Variant::A, "S.main()", &[]).0, "16\n");
}

#[test]
fn instance_calls_and_inheritance() {
    let src = "class C {
        static class Base { int x; Base(int x) { this.x = x; } int get() { return x; } }
        static class Sub extends Base { Sub() { super(4); } int get() { return x * 10; } }
        static void main() { Base b = new Sub(); print(b.get()); print(b); }
    }";
    let (out, st) = run(src, Variant::A, "C.main()", &[]);
    assert_eq!(st, RunStatus::Completed(Outcome::Normal));
    assert!(out.starts_with("40\nC.Sub@"), "{out}");
}

#[test]
fn overload_and_cast() {
    let src = "class O {
        static str f(Object o) { return \"obj\"; }
        static str f(str s) { return \"str\"; }
        static void main() { print(f(\"a\")); print(f((Object) \"a\")); }
    }";
    assert_eq!(run(src, Variant::A, "O.main()", &[]).0, "str\nobj\n");
}

#[test]
fn diagnostics() {
    assert_eq!(errors("class A { int f() { } }"), ["missing return statement"]);
    assert_eq!(errors("class A { void f() { return; print(1); } }"), ["unreachable statement"]);
    assert_eq!(errors("class A { void f() { print(y); } }"), ["cannot find symbol: variable y"]);
    assert_eq!(errors("class A { void f() { g(1); } }"), ["cannot find symbol: method g(int)"]);
    assert_eq!(
        errors("class A { void f() { if (1) print(1); } }"),
        ["incompatible types: int cannot be converted to bool"]
    );
    assert_eq!(errors("class A { void f() { 1 + 2; } }"), ["not a statement"]);
    assert_eq!(
        errors("class A { int x; static void f() { print(x); } }"),
        ["non-static variable x cannot be referenced from a static context"]
    );
    assert_eq!(errors("class A { void f() { int x = 2147483648; } }"), ["integer number too large"]);
    // Errors in separate members are all reported.
    assert_eq!(errors("class A { void f() { break; } void g() { str s = 1; } }").len(), 2);
}

#[test]
fn runtime_exceptions() {
    let src = "class R { static int f(int a) { return 10 / a; } static void g() { R r = null; r.h(); } void h() {} }";
    assert_eq!(
        run(src, Variant::A, "R.f(int)", &[Arg::Int(0)]).1,
        RunStatus::Completed(Outcome::Throws("ArithmeticException".into()))
    );
    assert_eq!(
        run(src, Variant::A, "R.g()", &[]).1,
        RunStatus::Completed(Outcome::Throws("NullPointerException".into()))
    );
}
