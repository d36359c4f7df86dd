//! In-memory bytecode model.

use std::fmt;

use crate::lang::Type;

/// Operand kind tag used by PRINT, CONCAT and BUILDER_APPEND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValKind {
    /// int
    I,
    /// bool
    Z,
    /// str
    S,
    /// any other reference
    A,
}

impl ValKind {
    pub fn of(ty: &Type) -> ValKind {
        match ty {
            Type::Int => ValKind::I,
            Type::Bool => ValKind::Z,
            Type::Str => ValKind::S,
            _ => ValKind::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            ValKind::I => 'I',
            ValKind::Z => 'Z',
            ValKind::S => 'S',
            ValKind::A => 'A',
        }
    }

    pub fn from_letter(c: char) -> Option<ValKind> {
        Some(match c {
            'I' => ValKind::I,
            'Z' => ValKind::Z,
            'S' => ValKind::S,
            'A' => ValKind::A,
            _ => return None,
        })
    }

    /// The source type this kind stands for (references become `Object`).
    pub fn to_type(self) -> Type {
        match self {
            ValKind::I => Type::Int,
            ValKind::Z => Type::Bool,
            ValKind::S => Type::Str,
            ValKind::A => Type::object(),
        }
    }
}

/// Field reference: `owner#name:type`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldRef {
    pub owner: String,
    pub name: String,
    pub ty: Type,
}

/// Method reference: `owner.name(T1,T2):R`. Constructors are named
/// `<init>`, class initializers `<clinit>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodRef {
    pub owner: String,
    pub name: String,
    pub params: Vec<Type>,
    pub ret: Type,
}

impl MethodRef {
    /// `owner.name(T1,T2)`, without the return type.
    pub fn key(&self) -> String {
        format!("{}.{}({})", self.owner, self.name, join_types(&self.params))
    }

    /// `name(T1,T2)`: identity within a class hierarchy for dispatch.
    pub fn descriptor(&self) -> String {
        format!("{}({})", self.name, join_types(&self.params))
    }
}

pub fn join_types(ts: &[Type]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Int(i32),
    Str(String),
    Class(String),
    Field(FieldRef),
    Method(MethodRef),
}

impl Const {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Const::Int(_) => "int",
            Const::Str(_) => "str",
            Const::Class(_) => "class",
            Const::Field(_) => "field",
            Const::Method(_) => "method",
        }
    }

    pub fn kind_rank(&self) -> u8 {
        match self {
            Const::Int(_) => 0,
            Const::Str(_) => 1,
            Const::Class(_) => 2,
            Const::Field(_) => 3,
            Const::Method(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Insn {
    Iconst(i32),
    Ldc(u32),
    AconstNull,
    Iload(u16),
    Istore(u16),
    Aload(u16),
    Astore(u16),
    GetStatic(u32),
    PutStatic(u32),
    GetField(u32),
    PutField(u32),
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Neg,
    Not,
    CmpEq,
    CmpNe,
    CmpLt,
    CmpLe,
    CmpGt,
    CmpGe,
    Concat(ValKind, ValKind),
    BuilderNew,
    BuilderAppend(ValKind),
    BuilderStr,
    IfEq(usize),
    IfNe(usize),
    Goto(usize),
    InvokeStatic(u32),
    InvokeVirt(u32),
    InvokeSpecial(u32),
    New(u32),
    Dup,
    Pop,
    Throw,
    Return,
    IReturn,
    AReturn,
    Print(ValKind),
}

impl Insn {
    pub fn pool_index(&self) -> Option<u32> {
        match *self {
            Insn::Ldc(k)
            | Insn::GetStatic(k)
            | Insn::PutStatic(k)
            | Insn::GetField(k)
            | Insn::PutField(k)
            | Insn::InvokeStatic(k)
            | Insn::InvokeVirt(k)
            | Insn::InvokeSpecial(k)
            | Insn::New(k) => Some(k),
            _ => None,
        }
    }

    pub fn with_pool_index(self, k: u32) -> Insn {
        match self {
            Insn::Ldc(_) => Insn::Ldc(k),
            Insn::GetStatic(_) => Insn::GetStatic(k),
            Insn::PutStatic(_) => Insn::PutStatic(k),
            Insn::GetField(_) => Insn::GetField(k),
            Insn::PutField(_) => Insn::PutField(k),
            Insn::InvokeStatic(_) => Insn::InvokeStatic(k),
            Insn::InvokeVirt(_) => Insn::InvokeVirt(k),
            Insn::InvokeSpecial(_) => Insn::InvokeSpecial(k),
            Insn::New(_) => Insn::New(k),
            other => other,
        }
    }

    pub fn jump_target(&self) -> Option<usize> {
        match *self {
            Insn::IfEq(t) | Insn::IfNe(t) | Insn::Goto(t) => Some(t),
            _ => None,
        }
    }

    pub fn with_jump_target(self, t: usize) -> Insn {
        match self {
            Insn::IfEq(_) => Insn::IfEq(t),
            Insn::IfNe(_) => Insn::IfNe(t),
            Insn::Goto(_) => Insn::Goto(t),
            other => other,
        }
    }

    /// Control never falls through to the next instruction.
    pub fn is_terminator(&self) -> bool {
        matches!(self, Insn::Goto(_) | Insn::Throw | Insn::Return | Insn::IReturn | Insn::AReturn)
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Insn::Iconst(_) => "ICONST",
            Insn::Ldc(_) => "LDC",
            Insn::AconstNull => "ACONST_NULL",
            Insn::Iload(_) => "ILOAD",
            Insn::Istore(_) => "ISTORE",
            Insn::Aload(_) => "ALOAD",
            Insn::Astore(_) => "ASTORE",
            Insn::GetStatic(_) => "GETSTATIC",
            Insn::PutStatic(_) => "PUTSTATIC",
            Insn::GetField(_) => "GETFIELD",
            Insn::PutField(_) => "PUTFIELD",
            Insn::Add => "ADD",
            Insn::Sub => "SUB",
            Insn::Mul => "MUL",
            Insn::Div => "DIV",
            Insn::Rem => "REM",
            Insn::Neg => "NEG",
            Insn::Not => "NOT",
            Insn::CmpEq => "CMPEQ",
            Insn::CmpNe => "CMPNE",
            Insn::CmpLt => "CMPLT",
            Insn::CmpLe => "CMPLE",
            Insn::CmpGt => "CMPGT",
            Insn::CmpGe => "CMPGE",
            Insn::Concat(..) => "CONCAT",
            Insn::BuilderNew => "BUILDER_NEW",
            Insn::BuilderAppend(_) => "BUILDER_APPEND",
            Insn::BuilderStr => "BUILDER_STR",
            Insn::IfEq(_) => "IFEQ",
            Insn::IfNe(_) => "IFNE",
            Insn::Goto(_) => "GOTO",
            Insn::InvokeStatic(_) => "INVOKESTATIC",
            Insn::InvokeVirt(_) => "INVOKEVIRT",
            Insn::InvokeSpecial(_) => "INVOKESPECIAL",
            Insn::New(_) => "NEW",
            Insn::Dup => "DUP",
            Insn::Pop => "POP",
            Insn::Throw => "THROW",
            Insn::Return => "RETURN",
            Insn::IReturn => "IRETURN",
            Insn::AReturn => "ARETURN",
            Insn::Print(_) => "PRINT",
        }
    }
}

impl fmt::Display for Insn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.mnemonic();
        match *self {
            Insn::Iconst(n) => write!(f, "{m} {n}"),
            Insn::Iload(s) | Insn::Istore(s) | Insn::Aload(s) | Insn::Astore(s) => write!(f, "{m} {s}"),
            Insn::Concat(a, b) => write!(f, "{m} {}{}", a.letter(), b.letter()),
            Insn::BuilderAppend(k) | Insn::Print(k) => write!(f, "{m} {}", k.letter()),
            Insn::IfEq(t) | Insn::IfNe(t) | Insn::Goto(t) => write!(f, "{m} {t}"),
            _ => match self.pool_index() {
                Some(k) => write!(f, "{m} #{k}"),
                None => f.write_str(m),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub public: bool,
    pub private: bool,
    pub is_static: bool,
    pub is_final: bool,
    pub synthetic: bool,
}

impl Flags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.public {
            v.push("public");
        }
        if self.private {
            v.push("private");
        }
        if self.is_static {
            v.push("static");
        }
        if self.is_final {
            v.push("final");
        }
        if self.synthetic {
            v.push("synthetic");
        }
        v
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.names();
        if n.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&n.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstValue {
    Int(i32),
    Bool(bool),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldInfo {
    pub name: String,
    pub ty: Type,
    pub flags: Flags,
    /// Compile-time constant of a static final scalar field.
    pub constant: Option<ConstValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Handler {
    /// Protected range `[start, end)` of instruction indices.
    pub start: usize,
    pub end: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerEntry {
    pub range: Handler,
    pub catch_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodInfo {
    pub owner: String,
    pub name: String,
    pub params: Vec<Type>,
    /// Source names of the parameters, in order.
    pub param_names: Vec<String>,
    pub ret: Type,
    pub flags: Flags,
    pub max_stack: u16,
    pub max_locals: u16,
    pub code: Vec<Insn>,
    pub handlers: Vec<HandlerEntry>,
}

impl MethodInfo {
    pub fn is_ctor(&self) -> bool {
        self.name == "<init>"
    }

    pub fn is_clinit(&self) -> bool {
        self.name == "<clinit>"
    }

    pub fn to_ref(&self) -> MethodRef {
        MethodRef {
            owner: self.owner.clone(),
            name: self.name.clone(),
            params: self.params.clone(),
            ret: self.ret.clone(),
        }
    }

    /// `owner.name(T1,T2)`
    pub fn key(&self) -> String {
        format!("{}.{}({})", self.owner, self.name, join_types(&self.params))
    }

    /// Slots taken by `this` and the parameters.
    pub fn arg_slots(&self) -> usize {
        self.params.len() + usize::from(!self.flags.is_static)
    }
}

/// One compiled class. A top-level class carries its nested classes in
/// `inners`; nested classes have no inners of their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BytecodeClass {
    pub name: String,
    pub superclass: String,
    pub flags: Flags,
    pub pool: Vec<Const>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub inners: Vec<BytecodeClass>,
}

impl BytecodeClass {
    pub fn new(name: impl Into<String>, superclass: impl Into<String>) -> Self {
        BytecodeClass {
            name: name.into(),
            superclass: superclass.into(),
            flags: Flags::default(),
            pool: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            inners: Vec::new(),
        }
    }

    /// Index of `c` in the pool, appending it if absent.
    pub fn intern(&mut self, c: Const) -> u32 {
        if let Some(i) = self.pool.iter().position(|p| *p == c) {
            return i as u32;
        }
        self.pool.push(c);
        (self.pool.len() - 1) as u32
    }

    pub fn method(&self, name: &str, params: &[Type]) -> Option<&MethodInfo> {
        self.methods.iter().find(|m| m.name == name && m.params == params)
    }

    /// This class followed by its nested classes.
    pub fn all_classes(&self) -> Vec<&BytecodeClass> {
        let mut v = vec![self];
        v.extend(self.inners.iter());
        v
    }

    pub fn field_ref(&self, k: u32) -> Option<&FieldRef> {
        match self.pool.get(k as usize) {
            Some(Const::Field(f)) => Some(f),
            _ => None,
        }
    }

    pub fn method_ref(&self, k: u32) -> Option<&MethodRef> {
        match self.pool.get(k as usize) {
            Some(Const::Method(m)) => Some(m),
            _ => None,
        }
    }

    pub fn class_ref(&self, k: u32) -> Option<&str> {
        match self.pool.get(k as usize) {
            Some(Const::Class(c)) => Some(c),
            _ => None,
        }
    }
}
