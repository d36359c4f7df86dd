//! Syntax tree for MiniJ source files.
//!
//! Every node carries a byte-offset [`Span`] into the text it was parsed
//! from. Structural comparison ignores spans: see [`ClassAst::same_structure`].

use std::fmt;

/// Half-open byte range `[start, end)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// True if the two ranges share at least one byte, or if `other` is an
    /// empty range located inside `self`.
    pub fn overlaps(&self, other: &Span) -> bool {
        if other.start == other.end {
            return self.start <= other.start && other.start < self.end;
        }
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Modifiers {
    pub public: bool,
    pub private: bool,
    pub is_static: bool,
    pub is_final: bool,
}

impl Modifiers {
    pub fn is_empty(&self) -> bool {
        !(self.public || self.private || self.is_static || self.is_final)
    }
}

/// Source-level types.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Str,
    Void,
    /// A class type by its dotted source name (`Object`, `RuntimeException`,
    /// `p.C`, `p.C.Inner`).
    Class(String),
}

impl Type {
    pub fn object() -> Type {
        Type::Class("Object".to_string())
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, Type::Str | Type::Class(_))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Str => f.write_str("str"),
            Type::Void => f.write_str("void"),
            Type::Class(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassAst {
    /// Dotted name. For top-level classes this is the fully qualified name;
    /// for nested classes it is the simple name as written.
    pub name: String,
    pub header: ClassHeader,
    pub members: Vec<TypeMember>,
    /// Whole declaration, from the first modifier to the closing brace.
    pub span: Span,
    /// From the opening brace to the closing brace, inclusive.
    pub body_span: Span,
    /// Length of the text this tree was parsed from (0 for synthesized trees).
    pub source_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassHeader {
    pub modifiers: Modifiers,
    pub superclass: Option<(String, Span)>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberKind {
    Field,
    Method,
    Constructor,
    NestedClass,
    StaticBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeMember {
    pub body: MemberBody,
    pub span: Span,
    pub errored: bool,
    /// `"original"` for parsed sources, otherwise the name of the decompiler
    /// that produced the member.
    pub origin: String,
}

impl TypeMember {
    pub fn new(body: MemberBody, span: Span) -> Self {
        TypeMember { body, span, errored: false, origin: ORIGINAL.to_string() }
    }

    pub fn kind(&self) -> MemberKind {
        match &self.body {
            MemberBody::Field(_) => MemberKind::Field,
            MemberBody::Method(_) => MemberKind::Method,
            MemberBody::Constructor(_) => MemberKind::Constructor,
            MemberBody::Nested(_) => MemberKind::NestedClass,
            MemberBody::StaticBlock(_) => MemberKind::StaticBlock,
        }
    }
}

pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, PartialEq)]
pub enum MemberBody {
    Field(FieldDecl),
    Method(MethodDecl),
    Constructor(CtorDecl),
    Nested(Box<ClassAst>),
    StaticBlock(StaticBlock),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub modifiers: Modifiers,
    pub ty: Type,
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: Type,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub modifiers: Modifiers,
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtorDecl {
    pub modifiers: Modifiers,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticBlock {
    /// Position among the static blocks of the enclosing class, from 0.
    pub ordinal: usize,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Block(Block),
    Local { ty: Type, name: String, init: Expr },
    Assign { target: Expr, value: Expr },
    Expr(Expr),
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    Try { body: Block, catch_ty: String, catch_name: String, handler: Block },
    Throw(Expr),
    Return(Option<Expr>),
    Break,
    Continue,
    Print(Expr),
    SuperCall(Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Eq | BinOp::Ne => 1,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 2,
            BinOp::Add | BinOp::Sub => 3,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 4,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() <= 2
    }

    /// The comparison that holds exactly when `self` does not.
    pub fn negated(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            BinOp::Ge => BinOp::Lt,
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    This,
    Name(String),
    Field { target: Box<Expr>, name: String },
    Call { target: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    New { class: String, args: Vec<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnOp, operand: Box<Expr> },
    Cast { ty: Type, expr: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Synthesized expression with an empty span.
    pub fn synth(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    /// The dotted path spelled by a chain of names and field accesses, if
    /// the expression is such a chain (`a.b.c`).
    pub fn as_path(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Name(n) => Some(n.clone()),
            ExprKind::Field { target, name } => target.as_path().map(|p| format!("{p}.{name}")),
            _ => None,
        }
    }
}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }

    pub fn synth(kind: StmtKind) -> Self {
        Stmt { kind, span: Span::default() }
    }
}

impl Block {
    pub fn synth(stmts: Vec<Stmt>) -> Self {
        Block { stmts, span: Span::default() }
    }
}

impl ClassAst {
    /// The simple (last) segment of the class name.
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// Structural equality, ignoring spans, member origins and error flags.
    pub fn same_structure(&self, other: &ClassAst) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.clear_positions();
        b.clear_positions();
        a == b
    }

    /// Resets every span (and the bookkeeping fields of members) so that
    /// two trees compare equal iff they have the same shape and labels.
    pub fn clear_positions(&mut self) {
        self.span = Span::default();
        self.body_span = Span::default();
        self.source_len = 0;
        self.header.span = Span::default();
        if let Some((_, s)) = &mut self.header.superclass {
            *s = Span::default();
        }
        for m in &mut self.members {
            m.span = Span::default();
            m.errored = false;
            m.origin = ORIGINAL.to_string();
            match &mut m.body {
                MemberBody::Field(f) => {
                    if let Some(e) = &mut f.init {
                        clear_expr(e);
                    }
                }
                MemberBody::Method(md) => {
                    md.params.iter_mut().for_each(|p| p.span = Span::default());
                    clear_block(&mut md.body);
                }
                MemberBody::Constructor(c) => {
                    c.params.iter_mut().for_each(|p| p.span = Span::default());
                    clear_block(&mut c.body);
                }
                MemberBody::Nested(c) => c.clear_positions(),
                MemberBody::StaticBlock(sb) => clear_block(&mut sb.body),
            }
        }
    }
}

fn clear_block(b: &mut Block) {
    b.span = Span::default();
    b.stmts.iter_mut().for_each(clear_stmt);
}

fn clear_stmt(s: &mut Stmt) {
    s.span = Span::default();
    match &mut s.kind {
        StmtKind::Block(b) => clear_block(b),
        StmtKind::Local { init, .. } => clear_expr(init),
        StmtKind::Assign { target, value } => {
            clear_expr(target);
            clear_expr(value);
        }
        StmtKind::Expr(e) | StmtKind::Throw(e) | StmtKind::Print(e) => clear_expr(e),
        StmtKind::If { cond, then_branch, else_branch } => {
            clear_expr(cond);
            clear_stmt(then_branch);
            if let Some(e) = else_branch {
                clear_stmt(e);
            }
        }
        StmtKind::While { cond, body } => {
            clear_expr(cond);
            clear_stmt(body);
        }
        StmtKind::Try { body, handler, .. } => {
            clear_block(body);
            clear_block(handler);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                clear_expr(e);
            }
        }
        StmtKind::SuperCall(args) => args.iter_mut().for_each(clear_expr),
        StmtKind::Break | StmtKind::Continue => {}
    }
}

fn clear_expr(e: &mut Expr) {
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Field { target, .. } => clear_expr(target),
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                clear_expr(t);
            }
            args.iter_mut().for_each(clear_expr);
        }
        ExprKind::New { args, .. } => args.iter_mut().for_each(clear_expr),
        ExprKind::Binary { lhs, rhs, .. } => {
            clear_expr(lhs);
            clear_expr(rhs);
        }
        ExprKind::Unary { operand, .. } => clear_expr(operand),
        ExprKind::Cast { expr, .. } => clear_expr(expr),
        _ => {}
    }
}
