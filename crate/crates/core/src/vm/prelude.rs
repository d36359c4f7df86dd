//! Library classes every program links against: `Object` and a small
//! exception hierarchy rooted at `Exception`.

use std::sync::OnceLock;

use super::model::*;
use crate::lang::Type;

pub const OBJECT: &str = "Object";
pub const EXCEPTION: &str = "Exception";

/// `(name, superclass)` of the exception classes below `Exception`.
const RUNTIME_FAMILY: &[(&str, &str)] = &[
    ("RuntimeException", "Exception"),
    ("ArithmeticException", "RuntimeException"),
    ("IllegalStateException", "RuntimeException"),
    ("IllegalArgumentException", "RuntimeException"),
    ("NullPointerException", "RuntimeException"),
];

fn public() -> Flags {
    Flags { public: true, ..Flags::default() }
}

fn method(owner: &str, name: &str, params: Vec<Type>, ret: Type, code: Vec<Insn>) -> MethodInfo {
    let names = (0..params.len()).map(|i| format!("p{i}")).collect();
    MethodInfo {
        owner: owner.into(),
        name: name.into(),
        params,
        param_names: names,
        ret,
        flags: public(),
        max_stack: 3,
        max_locals: 2,
        code,
        handlers: Vec::new(),
    }
}

fn init_ref(owner: &str, params: Vec<Type>) -> Const {
    Const::Method(MethodRef { owner: owner.into(), name: "<init>".into(), params, ret: Type::Void })
}

fn object() -> BytecodeClass {
    let mut c = BytecodeClass::new(OBJECT, "");
    c.flags = public();
    c.methods.push(method(OBJECT, "<init>", vec![], Type::Void, vec![Insn::Return]));
    c
}

fn exception() -> BytecodeClass {
    let mut c = BytecodeClass::new(EXCEPTION, OBJECT);
    c.flags = public();
    let sup = c.intern(init_ref(OBJECT, vec![]));
    let msg = c.intern(Const::Field(FieldRef { owner: EXCEPTION.into(), name: "message".into(), ty: Type::Str }));
    c.fields.push(FieldInfo {
        name: "message".into(),
        ty: Type::Str,
        flags: Flags { private: true, ..Flags::default() },
        constant: None,
    });
    c.methods.push(method(
        EXCEPTION,
        "<init>",
        vec![],
        Type::Void,
        vec![Insn::Aload(0), Insn::InvokeSpecial(sup), Insn::Return],
    ));
    c.methods.push(method(
        EXCEPTION,
        "<init>",
        vec![Type::Str],
        Type::Void,
        vec![
            Insn::Aload(0),
            Insn::InvokeSpecial(sup),
            Insn::Aload(0),
            Insn::Aload(1),
            Insn::PutField(msg),
            Insn::Return,
        ],
    ));
    c.methods.push(method(
        EXCEPTION,
        "getMessage",
        vec![],
        Type::Str,
        vec![Insn::Aload(0), Insn::GetField(msg), Insn::AReturn],
    ));
    c
}

fn derived_exception(name: &str, sup: &str) -> BytecodeClass {
    let mut c = BytecodeClass::new(name, sup);
    c.flags = public();
    let s0 = c.intern(init_ref(sup, vec![]));
    let s1 = c.intern(init_ref(sup, vec![Type::Str]));
    c.methods.push(method(
        name,
        "<init>",
        vec![],
        Type::Void,
        vec![Insn::Aload(0), Insn::InvokeSpecial(s0), Insn::Return],
    ));
    c.methods.push(method(
        name,
        "<init>",
        vec![Type::Str],
        Type::Void,
        vec![Insn::Aload(0), Insn::Aload(1), Insn::InvokeSpecial(s1), Insn::Return],
    ));
    c
}

/// The library classes, superclasses before subclasses.
pub fn prelude() -> &'static [BytecodeClass] {
    static P: OnceLock<Vec<BytecodeClass>> = OnceLock::new();
    P.get_or_init(|| {
        let mut v = vec![object(), exception()];
        v.extend(RUNTIME_FAMILY.iter().map(|(n, s)| derived_exception(n, s)));
        v
    })
}

pub fn is_library_class(name: &str) -> bool {
    prelude().iter().any(|c| c.name == name)
}
