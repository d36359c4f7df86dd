//! Structured intermediate form shared by the built-in backends.

use crate::lang::{BinOp, Type};
use crate::vm::{FieldRef, MethodRef, ValKind};

#[derive(Debug, Clone, PartialEq)]
pub enum IExpr {
    Int(i32),
    Bool(bool),
    Str(String),
    Null,
    This,
    Local(u16),
    GetStatic(FieldRef),
    GetField(Box<IExpr>, FieldRef),
    Bin(BinOp, Box<IExpr>, Box<IExpr>),
    Neg(Box<IExpr>),
    Not(Box<IExpr>),
    /// Direct concatenation instruction.
    Concat(ValKind, ValKind, Box<IExpr>, Box<IExpr>),
    BuilderNew,
    BuilderAppend(Box<IExpr>, ValKind, Box<IExpr>),
    BuilderStr(Box<IExpr>),
    StaticCall(MethodRef, Vec<IExpr>),
    VirtCall(Box<IExpr>, MethodRef, Vec<IExpr>),
    /// Object creation. `wrapper` holds the synthetic trailing parameter
    /// type when the constructor reference targets an access wrapper.
    New(MethodRef, Vec<IExpr>, Option<Type>),
    /// Object allocated by NEW whose constructor has not run yet.
    Pending(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IStmt {
    Store(u16, IExpr),
    PutStatic(FieldRef, IExpr),
    PutField(IExpr, FieldRef, IExpr),
    Expr(IExpr),
    Print(ValKind, IExpr),
    Return(Option<IExpr>),
    Throw(IExpr),
    SuperCall(MethodRef, Vec<IExpr>),
    /// `then` runs when `cond` holds. `ifne` records that the branch jumped
    /// to `then` (rather than to `els`) in the bytecode.
    If {
        cond: IExpr,
        then: Vec<IStmt>,
        els: Option<Vec<IStmt>>,
        ifne: bool,
    },
    /// `cond == None` is `while (true)`.
    While {
        cond: Option<IExpr>,
        body: Vec<IStmt>,
    },
    Try {
        body: Vec<IStmt>,
        catch_type: String,
        slot: u16,
        handler: Vec<IStmt>,
    },
    Break,
    Continue,
}

impl IExpr {
    pub fn children(&self) -> Vec<&IExpr> {
        match self {
            IExpr::GetField(o, _) | IExpr::Neg(o) | IExpr::Not(o) | IExpr::BuilderStr(o) => vec![o],
            IExpr::Bin(_, a, b) | IExpr::Concat(_, _, a, b) | IExpr::BuilderAppend(a, _, b) => vec![a, b],
            IExpr::StaticCall(_, args) | IExpr::New(_, args, _) => args.iter().collect(),
            IExpr::VirtCall(r, _, args) => std::iter::once(&**r).chain(args.iter()).collect(),
            _ => Vec::new(),
        }
    }

    /// Pre-order visit.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a IExpr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Bottom-up rewrite.
    pub fn map(self, f: &mut impl FnMut(IExpr) -> IExpr) -> IExpr {
        let b = |e: Box<IExpr>, f: &mut dyn FnMut(IExpr) -> IExpr| Box::new(map_dyn(*e, f));
        let e = match self {
            IExpr::GetField(o, r) => IExpr::GetField(b(o, f), r),
            IExpr::Neg(o) => IExpr::Neg(b(o, f)),
            IExpr::Not(o) => IExpr::Not(b(o, f)),
            IExpr::BuilderStr(o) => IExpr::BuilderStr(b(o, f)),
            IExpr::Bin(op, x, y) => IExpr::Bin(op, b(x, f), b(y, f)),
            IExpr::Concat(k0, k1, x, y) => IExpr::Concat(k0, k1, b(x, f), b(y, f)),
            IExpr::BuilderAppend(x, k, y) => IExpr::BuilderAppend(b(x, f), k, b(y, f)),
            IExpr::StaticCall(m, args) => IExpr::StaticCall(m, args.into_iter().map(|a| map_dyn(a, f)).collect()),
            IExpr::New(m, args, w) => IExpr::New(m, args.into_iter().map(|a| map_dyn(a, f)).collect(), w),
            IExpr::VirtCall(r, m, args) => {
                IExpr::VirtCall(b(r, f), m, args.into_iter().map(|a| map_dyn(a, f)).collect())
            }
            other => other,
        };
        f(e)
    }
}

fn map_dyn(e: IExpr, f: &mut dyn FnMut(IExpr) -> IExpr) -> IExpr {
    e.map(&mut |x| f(x))
}

impl IStmt {
    /// Expressions directly owned by this statement (not nested statements).
    pub fn exprs(&self) -> Vec<&IExpr> {
        match self {
            IStmt::Store(_, e) | IStmt::PutStatic(_, e) | IStmt::Expr(e) | IStmt::Print(_, e) | IStmt::Throw(e) => {
                vec![e]
            }
            IStmt::PutField(o, _, v) => vec![o, v],
            IStmt::Return(e) => e.iter().collect(),
            IStmt::SuperCall(_, args) => args.iter().collect(),
            IStmt::If { cond, .. } => vec![cond],
            IStmt::While { cond, .. } => cond.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn blocks(&self) -> Vec<&Vec<IStmt>> {
        match self {
            IStmt::If { then, els, .. } => std::iter::once(then).chain(els.iter()).collect(),
            IStmt::While { body, .. } => vec![body],
            IStmt::Try { body, handler, .. } => vec![body, handler],
            _ => Vec::new(),
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Vec<IStmt>> {
        match self {
            IStmt::If { then, els, .. } => std::iter::once(then).chain(els.iter_mut()).collect(),
            IStmt::While { body, .. } => vec![body],
            IStmt::Try { body, handler, .. } => vec![body, handler],
            _ => Vec::new(),
        }
    }

    /// Applies `f` to every expression, recursively through nested blocks.
    pub fn map_exprs(&mut self, f: &mut impl FnMut(IExpr) -> IExpr) {
        let take = |e: &mut IExpr, f: &mut dyn FnMut(IExpr) -> IExpr| {
            let old = std::mem::replace(e, IExpr::Null);
            *e = map_dyn(old, f);
        };
        match self {
            IStmt::Store(_, e) | IStmt::PutStatic(_, e) | IStmt::Expr(e) | IStmt::Print(_, e) | IStmt::Throw(e) => {
                take(e, f)
            }
            IStmt::PutField(o, _, v) => {
                take(o, f);
                take(v, f);
            }
            IStmt::Return(Some(e)) => take(e, f),
            IStmt::SuperCall(_, args) => args.iter_mut().for_each(|a| take(a, f)),
            IStmt::If { cond, .. } => take(cond, f),
            IStmt::While { cond: Some(c), .. } => take(c, f),
            _ => {}
        }
        for b in self.blocks_mut() {
            for s in b.iter_mut() {
                s.map_exprs(f);
            }
        }
    }
}

/// Pre-order visit of statements.
pub fn visit_stmts<'a>(stmts: &'a [IStmt], f: &mut impl FnMut(&'a IStmt)) {
    for s in stmts {
        f(s);
        for b in s.blocks() {
            visit_stmts(b, f);
        }
    }
}

/// Whether a statement list can complete normally (same rules as the
/// compiler's reachability check).
pub fn can_complete(stmts: &[IStmt]) -> bool {
    stmts.last().is_none_or(stmt_can_complete)
}

fn stmt_can_complete(s: &IStmt) -> bool {
    match s {
        IStmt::Return(_) | IStmt::Throw(_) | IStmt::Break | IStmt::Continue => false,
        IStmt::If { then, els: Some(e), .. } => can_complete(then) || can_complete(e),
        IStmt::While { cond: None, body } => has_break(body),
        IStmt::Try { body, handler, .. } => can_complete(body) || can_complete(handler),
        _ => true,
    }
}

/// Whether `body` contains a `break` that exits this loop.
pub fn has_break(body: &[IStmt]) -> bool {
    body.iter().any(|s| match s {
        IStmt::Break => true,
        IStmt::While { .. } => false,
        other => other.blocks().into_iter().any(|b| has_break(b)),
    })
}
