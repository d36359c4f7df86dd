//! Type checking and bytecode emission for method bodies.

use std::collections::BTreeSet;

use super::env::*;
use super::Variant;
use crate::lang::signature::qualify_class_name;
use crate::lang::*;
use crate::vm::*;

type CResult<T> = Result<T, Diagnostic>;

/// A request for a synthetic constructor wrapper: `(nested class, params
/// of the private constructor)`.
pub type WrapperKey = (String, Vec<Type>);

struct Local {
    name: String,
    ty: Type,
    slot: u16,
}

#[derive(Default)]
struct LoopCtx {
    breaks: Vec<usize>,
    continues: Vec<usize>,
    /// Known target for `continue` (back edges of `while (true)`).
    continue_target: Option<usize>,
    has_break: bool,
}

enum Var {
    Local(u16, Type),
    Field(String, FieldSig),
}

pub struct Gen<'a> {
    pub env: &'a Env,
    pub variant: Variant,
    pub top: &'a ClassAst,
    pub class: &'a ClassInfo,
    pub bc: &'a mut BytecodeClass,
    pub wrappers: &'a mut BTreeSet<WrapperKey>,
    is_static: bool,
    ret: Type,
    pub code: Vec<Insn>,
    pub handlers: Vec<HandlerEntry>,
    scopes: Vec<Vec<Local>>,
    next_slot: u16,
    max_slot: u16,
    loops: Vec<LoopCtx>,
}

fn err<T>(msg: impl Into<String>, span: Span) -> CResult<T> {
    Err(Diagnostic::error(msg, span))
}

fn is_int_like(t: &Type) -> bool {
    matches!(t, Type::Int | Type::Bool)
}

fn null_type() -> Type {
    Type::Class(NULL_TYPE.to_string())
}

fn type_name(t: &Type) -> String {
    match t {
        Type::Class(n) if n == NULL_TYPE => "<null>".to_string(),
        other => other.to_string(),
    }
}

impl<'a> Gen<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        env: &'a Env,
        variant: Variant,
        top: &'a ClassAst,
        class: &'a ClassInfo,
        bc: &'a mut BytecodeClass,
        wrappers: &'a mut BTreeSet<WrapperKey>,
        is_static: bool,
        ret: Type,
    ) -> Self {
        let first = u16::from(!is_static);
        Gen {
            env,
            variant,
            top,
            class,
            bc,
            wrappers,
            is_static,
            ret,
            code: Vec::new(),
            handlers: Vec::new(),
            scopes: vec![Vec::new()],
            next_slot: first,
            max_slot: first,
            loops: Vec::new(),
        }
    }

    pub fn max_locals(&self) -> u16 {
        self.max_slot
    }

    pub fn qualify(&self, t: &Type) -> CResult<Type> {
        self.qualify_at(t, Span::default())
    }

    fn qualify_at(&self, t: &Type, span: Span) -> CResult<Type> {
        let q = qualify_type_in(self.top, t);
        if let Type::Class(n) = &q {
            if self.env.get(n).is_none() && n != BUILDER {
                return err(format!("cannot find symbol: class {n}"), span);
            }
        }
        Ok(q)
    }

    pub fn declare(&mut self, name: &str, ty: Type, span: Span) -> CResult<u16> {
        if self.scopes.iter().flatten().any(|l| l.name == name) {
            return err(format!("variable {name} is already defined"), span);
        }
        let slot = self.next_slot;
        self.next_slot += 1;
        self.max_slot = self.max_slot.max(self.next_slot);
        self.scopes.last_mut().unwrap().push(Local { name: name.to_string(), ty, slot });
        Ok(slot)
    }

    fn emit(&mut self, i: Insn) -> usize {
        self.code.push(i);
        self.code.len() - 1
    }

    fn patch(&mut self, at: usize, target: usize) {
        self.code[at] = self.code[at].with_jump_target(target);
    }

    fn pool(&mut self, c: Const) -> u32 {
        self.bc.intern(c)
    }

    fn load(&mut self, slot: u16, ty: &Type) {
        self.emit(if is_int_like(ty) { Insn::Iload(slot) } else { Insn::Aload(slot) });
    }

    fn store(&mut self, slot: u16, ty: &Type) {
        self.emit(if is_int_like(ty) { Insn::Istore(slot) } else { Insn::Astore(slot) });
    }

    fn emit_const(&mut self, v: &ConstValue) -> Type {
        match v {
            ConstValue::Int(n) => {
                self.emit(Insn::Iconst(*n));
                Type::Int
            }
            ConstValue::Bool(b) => {
                self.emit(Insn::Iconst(i32::from(*b)));
                Type::Bool
            }
            ConstValue::Str(s) => {
                let k = self.pool(Const::Str(s.clone()));
                self.emit(Insn::Ldc(k));
                Type::Str
            }
        }
    }

    fn field_ref(&mut self, owner: &str, f: &FieldSig) -> u32 {
        self.pool(Const::Field(FieldRef { owner: owner.to_string(), name: f.name.clone(), ty: f.ty.clone() }))
    }

    fn method_ref(&mut self, owner: &str, name: &str, params: &[Type], ret: &Type) -> u32 {
        self.pool(Const::Method(MethodRef {
            owner: owner.to_string(),
            name: name.to_string(),
            params: params.to_vec(),
            ret: ret.clone(),
        }))
    }

    fn check_assignable(&self, from: &Type, to: &Type, span: Span) -> CResult<()> {
        if self.env.assignable(from, to) {
            Ok(())
        } else {
            err(format!("incompatible types: {} cannot be converted to {}", type_name(from), to), span)
        }
    }

    fn find_var(&self, name: &str) -> Option<Var> {
        for l in self.scopes.iter().rev().flat_map(|s| s.iter().rev()) {
            if l.name == name {
                return Some(Var::Local(l.slot, l.ty.clone()));
            }
        }
        if let Some((owner, f)) = self.env.field(&self.class.name, name) {
            return Some(Var::Field(owner.name.clone(), f.clone()));
        }
        if let Some(outer) = &self.class.outer {
            if let Some((owner, f)) = self.env.field(outer, name) {
                if f.is_static {
                    return Some(Var::Field(owner.name.clone(), f.clone()));
                }
            }
        }
        None
    }

    /// The class named by a dotted path expression, unless its first
    /// segment is a variable.
    fn class_of_path(&self, e: &Expr) -> Option<String> {
        let p = e.as_path()?;
        let first = p.split('.').next().unwrap();
        if self.find_var(first).is_some() {
            return None;
        }
        let q = qualify_class_name(self.top, &p);
        if self.env.get(&q).is_some() || q == BUILDER {
            Some(q)
        } else {
            None
        }
    }

    // ---- statements -------------------------------------------------------

    /// Emits a block in a fresh scope; returns whether it can complete normally.
    pub fn block(&mut self, b: &Block) -> CResult<bool> {
        self.scopes.push(Vec::new());
        let r = self.stmts(&b.stmts);
        self.scopes.pop();
        r
    }

    pub fn stmts(&mut self, stmts: &[Stmt]) -> CResult<bool> {
        let mut live = true;
        for s in stmts {
            if !live {
                return err("unreachable statement", s.span);
            }
            live = self.stmt(s)?;
        }
        Ok(live)
    }

    /// Statement used as a branch or loop body: a nested scope.
    fn sub_stmt(&mut self, s: &Stmt) -> CResult<bool> {
        if let StmtKind::Local { .. } = s.kind {
            return err("variable declaration not allowed here", s.span);
        }
        self.scopes.push(Vec::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    fn cond(&mut self, e: &Expr) -> CResult<()> {
        let t = self.expr(e)?;
        if t != Type::Bool {
            return err(format!("incompatible types: {} cannot be converted to bool", type_name(&t)), e.span);
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> CResult<bool> {
        match &s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::Local { ty, name, init } => {
                let ty = self.qualify_at(ty, s.span)?;
                if ty == Type::Void {
                    return err("illegal start of expression: void variable", s.span);
                }
                let t = self.expr(init)?;
                self.check_assignable(&t, &ty, init.span)?;
                let slot = self.declare(name, ty.clone(), s.span)?;
                self.store(slot, &ty);
                Ok(true)
            }
            StmtKind::Assign { target, value } => {
                self.assign(target, value)?;
                Ok(true)
            }
            StmtKind::Expr(e) => {
                if !matches!(e.kind, ExprKind::Call { .. } | ExprKind::New { .. }) {
                    return err("not a statement", e.span);
                }
                let t = self.expr(e)?;
                if t != Type::Void {
                    self.emit(Insn::Pop);
                }
                Ok(true)
            }
            StmtKind::Print(e) => {
                let t = self.expr(e)?;
                if t == Type::Void {
                    return err("'void' type not allowed here", e.span);
                }
                self.emit(Insn::Print(ValKind::of(&t)));
                Ok(true)
            }
            StmtKind::SuperCall(_) => err("call to super must be first statement in constructor", s.span),
            StmtKind::Return(e) => {
                match (e, &self.ret) {
                    (None, Type::Void) => {
                        self.emit(Insn::Return);
                    }
                    (None, _) => return err("missing return value", s.span),
                    (Some(e), Type::Void) => return err("incompatible types: unexpected return value", e.span),
                    (Some(e), r) => {
                        let r = r.clone();
                        let t = self.expr(e)?;
                        self.check_assignable(&t, &r, e.span)?;
                        self.emit(if is_int_like(&r) { Insn::IReturn } else { Insn::AReturn });
                    }
                }
                Ok(false)
            }
            StmtKind::Throw(e) => {
                let t = self.expr(e)?;
                let ok = matches!(&t, Type::Class(n) if n == NULL_TYPE || self.env.is_subclass(n, "Exception"));
                if !ok {
                    return err(
                        format!("incompatible types: {} cannot be converted to Exception", type_name(&t)),
                        e.span,
                    );
                }
                self.emit(Insn::Throw);
                Ok(false)
            }
            StmtKind::Break => {
                let Some(l) = self.loops.last_mut() else { return err("break outside switch or loop", s.span) };
                l.has_break = true;
                let at = self.code.len();
                self.loops.last_mut().unwrap().breaks.push(at);
                self.emit(Insn::Goto(usize::MAX));
                Ok(false)
            }
            StmtKind::Continue => {
                let Some(l) = self.loops.last() else { return err("continue outside of loop", s.span) };
                match l.continue_target {
                    Some(t) => {
                        self.emit(Insn::Goto(t));
                    }
                    None => {
                        let at = self.emit(Insn::Goto(usize::MAX));
                        self.loops.last_mut().unwrap().continues.push(at);
                    }
                }
                Ok(false)
            }
            StmtKind::If { cond, then_branch, else_branch } => self.if_stmt(cond, then_branch, else_branch.as_deref()),
            StmtKind::While { cond, body } => self.while_stmt(cond, body),
            StmtKind::Try { body, catch_ty, catch_name, handler } => {
                let cty = self.qualify_at(&Type::Class(catch_ty.clone()), s.span)?;
                let Type::Class(cname) = &cty else { unreachable!() };
                if !self.env.is_subclass(cname, "Exception") {
                    return err(format!("incompatible types: {cname} cannot be converted to Exception"), s.span);
                }
                let start = self.code.len();
                let body_live = self.block(body)?;
                let end = self.code.len();
                let join = if body_live { Some(self.emit(Insn::Goto(usize::MAX))) } else { None };
                if end == start {
                    // Nothing can throw inside an empty try body; the handler is dead.
                    if let Some(j) = join {
                        self.code.pop();
                        let _ = j;
                    }
                    return Ok(true);
                }
                let target = self.code.len();
                self.scopes.push(Vec::new());
                let slot = self.declare(catch_name, cty.clone(), s.span)?;
                self.emit(Insn::Astore(slot));
                let handler_live = self.stmts(&handler.stmts)?;
                self.scopes.pop();
                let after = self.code.len();
                if let Some(j) = join {
                    self.patch(j, after);
                }
                self.handlers.push(HandlerEntry { range: Handler { start, end, target }, catch_type: cname.clone() });
                Ok(body_live || handler_live)
            }
        }
    }

    fn if_stmt(&mut self, cond: &Expr, then_b: &Stmt, else_b: Option<&Stmt>) -> CResult<bool> {
        self.cond(cond)?;
        match else_b {
            None => {
                let j = self.emit(Insn::IfEq(usize::MAX));
                self.sub_stmt(then_b)?;
                let end = self.code.len();
                self.patch(j, end);
                Ok(true)
            }
            Some(else_b) => {
                let (first, second, jump) = match self.variant {
                    Variant::A => (then_b, else_b, Insn::IfEq(usize::MAX)),
                    Variant::B => (else_b, then_b, Insn::IfNe(usize::MAX)),
                };
                let j = self.emit(jump);
                let live1 = self.sub_stmt(first)?;
                let g = if live1 { Some(self.emit(Insn::Goto(usize::MAX))) } else { None };
                let second_start = self.code.len();
                self.patch(j, second_start);
                let live2 = self.sub_stmt(second)?;
                let end = self.code.len();
                if let Some(g) = g {
                    self.patch(g, end);
                }
                Ok(live1 || live2)
            }
        }
    }

    fn while_stmt(&mut self, cond: &Expr, body: &Stmt) -> CResult<bool> {
        if matches!(cond.kind, ExprKind::Bool(true)) {
            let head = self.code.len();
            self.loops.push(LoopCtx { continue_target: Some(head), ..LoopCtx::default() });
            let r = self.sub_stmt(body);
            let ctx = self.loops.pop().unwrap();
            r?;
            self.emit(Insn::Goto(head));
            let exit = self.code.len();
            for b in ctx.breaks {
                self.patch(b, exit);
            }
            return Ok(ctx.has_break);
        }
        let g = self.emit(Insn::Goto(usize::MAX));
        let body_start = self.code.len();
        self.loops.push(LoopCtx::default());
        let r = self.sub_stmt(body);
        let ctx = self.loops.pop().unwrap();
        r?;
        let cond_start = self.code.len();
        self.patch(g, cond_start);
        for c in &ctx.continues {
            self.patch(*c, cond_start);
        }
        self.cond(cond)?;
        self.emit(Insn::IfNe(body_start));
        let exit = self.code.len();
        for b in ctx.breaks {
            self.patch(b, exit);
        }
        Ok(true)
    }

    fn assign(&mut self, target: &Expr, value: &Expr) -> CResult<()> {
        let check_final = |f: &FieldSig, span: Span| -> CResult<()> {
            if f.constant.is_some() {
                return err(format!("cannot assign a value to final variable {}", f.name), span);
            }
            Ok(())
        };
        match &target.kind {
            ExprKind::Name(n) => match self.find_var(n) {
                Some(Var::Local(slot, ty)) => {
                    let t = self.expr(value)?;
                    self.check_assignable(&t, &ty, value.span)?;
                    self.store(slot, &ty);
                    Ok(())
                }
                Some(Var::Field(owner, f)) => {
                    check_final(&f, target.span)?;
                    if f.is_static {
                        let t = self.expr(value)?;
                        self.check_assignable(&t, &f.ty, value.span)?;
                        let k = self.field_ref(&owner, &f);
                        self.emit(Insn::PutStatic(k));
                    } else {
                        if self.is_static {
                            return err(
                                format!("non-static variable {n} cannot be referenced from a static context"),
                                target.span,
                            );
                        }
                        self.emit(Insn::Aload(0));
                        let t = self.expr(value)?;
                        self.check_assignable(&t, &f.ty, value.span)?;
                        let k = self.field_ref(&owner, &f);
                        self.emit(Insn::PutField(k));
                    }
                    Ok(())
                }
                None => err(format!("cannot find symbol: variable {n}"), target.span),
            },
            ExprKind::Field { target: obj, name } => {
                if let Some(cls) = self.class_of_path(obj) {
                    let Some((owner, f)) = self.env.field(&cls, name) else {
                        return err(format!("cannot find symbol: variable {name} in {cls}"), target.span);
                    };
                    let (owner, f) = (owner.name.clone(), f.clone());
                    if !f.is_static {
                        return err(
                            format!("non-static variable {name} cannot be referenced from a static context"),
                            target.span,
                        );
                    }
                    check_final(&f, target.span)?;
                    let t = self.expr(value)?;
                    self.check_assignable(&t, &f.ty, value.span)?;
                    let k = self.field_ref(&owner, &f);
                    self.emit(Insn::PutStatic(k));
                    return Ok(());
                }
                let ot = self.expr(obj)?;
                let Type::Class(cls) = &ot else {
                    return err(format!("{} cannot be dereferenced", type_name(&ot)), obj.span);
                };
                let Some((owner, f)) = self.env.field(cls, name) else {
                    return err(format!("cannot find symbol: variable {name} in {cls}"), target.span);
                };
                let (owner, f) = (owner.name.clone(), f.clone());
                if f.is_static {
                    return err(format!("static variable {name} accessed through an instance"), target.span);
                }
                let t = self.expr(value)?;
                self.check_assignable(&t, &f.ty, value.span)?;
                let k = self.field_ref(&owner, &f);
                self.emit(Insn::PutField(k));
                Ok(())
            }
            _ => err("invalid assignment target", target.span),
        }
    }

    // ---- expressions ------------------------------------------------------

    pub fn expr(&mut self, e: &Expr) -> CResult<Type> {
        match &e.kind {
            ExprKind::Int(n) => {
                if *n > i32::MAX as i64 {
                    return err("integer number too large", e.span);
                }
                self.emit(Insn::Iconst(*n as i32));
                Ok(Type::Int)
            }
            ExprKind::Str(s) => Ok(self.emit_const(&ConstValue::Str(s.clone()))),
            ExprKind::Bool(b) => Ok(self.emit_const(&ConstValue::Bool(*b))),
            ExprKind::Null => {
                self.emit(Insn::AconstNull);
                Ok(null_type())
            }
            ExprKind::This => {
                if self.is_static {
                    return err("non-static variable this cannot be referenced from a static context", e.span);
                }
                self.emit(Insn::Aload(0));
                Ok(Type::Class(self.class.name.clone()))
            }
            ExprKind::Name(n) => match self.find_var(n) {
                Some(Var::Local(slot, ty)) => {
                    self.load(slot, &ty);
                    Ok(ty)
                }
                Some(Var::Field(owner, f)) => self.read_field(&owner, &f, None, e.span),
                None => err(format!("cannot find symbol: variable {n}"), e.span),
            },
            ExprKind::Field { target, name } => {
                if let Some(cls) = self.class_of_path(target) {
                    let Some((owner, f)) = self.env.field(&cls, name) else {
                        return err(format!("cannot find symbol: variable {name} in {cls}"), e.span);
                    };
                    let (owner, f) = (owner.name.clone(), f.clone());
                    if !f.is_static {
                        return err(
                            format!("non-static variable {name} cannot be referenced from a static context"),
                            e.span,
                        );
                    }
                    return self.read_field(&owner, &f, None, e.span);
                }
                let ot = self.expr(target)?;
                let Type::Class(cls) = &ot else {
                    return err(format!("{} cannot be dereferenced", type_name(&ot)), target.span);
                };
                let Some((owner, f)) = self.env.field(cls, name) else {
                    return err(format!("cannot find symbol: variable {name} in {cls}"), e.span);
                };
                let (owner, f) = (owner.name.clone(), f.clone());
                if f.is_static {
                    return err(format!("static variable {name} accessed through an instance"), e.span);
                }
                self.read_field(&owner, &f, Some(()), e.span)
            }
            ExprKind::Call { target, name, args } => self.call(target.as_deref(), name, args, e.span),
            ExprKind::New { class, args } => self.new_object(class, args, e.span),
            ExprKind::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs, e.span),
            ExprKind::Unary { op: UnOp::Neg, operand } => {
                if let ExprKind::Int(n) = operand.kind {
                    if n > 1 << 31 {
                        return err("integer number too large", operand.span);
                    }
                    self.emit(Insn::Iconst((-n) as i32));
                    return Ok(Type::Int);
                }
                let t = self.expr(operand)?;
                if t != Type::Int {
                    return err(format!("bad operand type {} for unary operator '-'", type_name(&t)), e.span);
                }
                self.emit(Insn::Neg);
                Ok(Type::Int)
            }
            ExprKind::Unary { op: UnOp::Not, operand } => {
                let t = self.expr(operand)?;
                if t != Type::Bool {
                    return err(format!("bad operand type {} for unary operator '!'", type_name(&t)), e.span);
                }
                self.emit(Insn::Not);
                Ok(Type::Bool)
            }
            ExprKind::Cast { ty, expr } => {
                let target = self.qualify_at(ty, e.span)?;
                let t = self.expr(expr)?;
                if t != target && !(target.is_reference() && self.env.assignable(&t, &target)) {
                    return err(
                        format!("incompatible types: {} cannot be converted to {}", type_name(&t), target),
                        e.span,
                    );
                }
                Ok(target)
            }
        }
    }

    /// Reads a field; `receiver` is Some when the object is already on the
    /// stack, otherwise `this` is loaded for instance fields.
    fn read_field(&mut self, owner: &str, f: &FieldSig, receiver: Option<()>, span: Span) -> CResult<Type> {
        if f.is_static {
            if let Some(v) = &f.constant {
                return Ok(self.emit_const(v));
            }
            let k = self.field_ref(owner, f);
            self.emit(Insn::GetStatic(k));
            return Ok(f.ty.clone());
        }
        if receiver.is_none() {
            if self.is_static {
                return err(format!("non-static variable {} cannot be referenced from a static context", f.name), span);
            }
            self.emit(Insn::Aload(0));
        }
        let k = self.field_ref(owner, f);
        self.emit(Insn::GetField(k));
        Ok(f.ty.clone())
    }

    fn args(&mut self, args: &[Expr]) -> CResult<Vec<Type>> {
        let mut ts = Vec::with_capacity(args.len());
        for a in args {
            let t = self.expr(a)?;
            if t == Type::Void {
                return err("'void' type not allowed here", a.span);
            }
            ts.push(t);
        }
        Ok(ts)
    }

    fn call(&mut self, target: Option<&Expr>, name: &str, args: &[Expr], span: Span) -> CResult<Type> {
        let arg_list = |ts: &[Type]| ts.iter().map(type_name).collect::<Vec<_>>().join(",");
        match target {
            None => {
                let mark = self.code.len();
                let ts = self.args(args)?;
                let mut cands = self.env.methods_named(&self.class.name, name);
                if cands.is_empty() {
                    if let Some(o) = &self.class.outer {
                        cands = self.env.methods_named(o, name).into_iter().filter(|m| m.is_static).collect();
                    }
                }
                let m = match self.env.resolve(&cands, |m| &m.params, &ts) {
                    Ok(m) => m.clone(),
                    Err(true) => return err(format!("reference to {name} is ambiguous"), span),
                    Err(false) => return err(format!("cannot find symbol: method {name}({})", arg_list(&ts)), span),
                };
                let k = self.method_ref(&m.owner, &m.name, &m.params, &m.ret);
                if m.is_static {
                    self.emit(Insn::InvokeStatic(k));
                } else {
                    if self.is_static {
                        return err(
                            format!(
                                "non-static method {name}({}) cannot be referenced from a static context",
                                crate::vm::join_types(&m.params)
                            ),
                            span,
                        );
                    }
                    // Expressions contain no jumps, so inserting the receiver
                    // in front of the arguments leaves all targets intact.
                    self.code.insert(mark, Insn::Aload(0));
                    self.emit(Insn::InvokeVirt(k));
                }
                Ok(m.ret)
            }
            Some(t) => {
                if let Some(cls) = self.class_of_path(t) {
                    let ts = self.args(args)?;
                    let cands = self.env.methods_named(&cls, name);
                    let m = match self.env.resolve(&cands, |m| &m.params, &ts) {
                        Ok(m) => m.clone(),
                        Err(true) => return err(format!("reference to {name} is ambiguous"), span),
                        Err(false) => {
                            return err(format!("cannot find symbol: method {name}({}) in {cls}", arg_list(&ts)), span)
                        }
                    };
                    if !m.is_static {
                        return err(
                            format!("non-static method {name} cannot be referenced from a static context"),
                            span,
                        );
                    }
                    let k = self.method_ref(&m.owner, &m.name, &m.params, &m.ret);
                    self.emit(Insn::InvokeStatic(k));
                    return Ok(m.ret);
                }
                let rt = self.expr(t)?;
                let Type::Class(cls) = &rt else {
                    return err(format!("{} cannot be dereferenced", type_name(&rt)), t.span);
                };
                if cls == BUILDER {
                    return self.builder_call(name, args, span);
                }
                let ts = self.args(args)?;
                let cands = self.env.methods_named(cls, name);
                let m = match self.env.resolve(&cands, |m| &m.params, &ts) {
                    Ok(m) => m.clone(),
                    Err(true) => return err(format!("reference to {name} is ambiguous"), span),
                    Err(false) => {
                        return err(format!("cannot find symbol: method {name}({}) in {cls}", arg_list(&ts)), span)
                    }
                };
                if m.is_static {
                    return err(format!("static method {name} invoked through an instance"), span);
                }
                let k = self.method_ref(&m.owner, &m.name, &m.params, &m.ret);
                self.emit(Insn::InvokeVirt(k));
                Ok(m.ret)
            }
        }
    }

    fn builder_call(&mut self, name: &str, args: &[Expr], span: Span) -> CResult<Type> {
        match (name, args.len()) {
            ("append", 1) => {
                let t = self.args(args)?.remove(0);
                self.emit(Insn::BuilderAppend(ValKind::of(&t)));
                Ok(Type::Class(BUILDER.into()))
            }
            ("toString", 0) => {
                self.emit(Insn::BuilderStr);
                Ok(Type::Str)
            }
            _ => err(format!("cannot find symbol: method {name} in {BUILDER}"), span),
        }
    }

    fn new_object(&mut self, class: &str, args: &[Expr], span: Span) -> CResult<Type> {
        let q = qualify_class_name(self.top, class);
        if q == BUILDER {
            if !args.is_empty() {
                return err(format!("no applicable constructor: {BUILDER}({} args)", args.len()), span);
            }
            self.emit(Insn::BuilderNew);
            return Ok(Type::Class(q));
        }
        let Some(info) = self.env.get(&q) else {
            return err(format!("cannot find symbol: class {class}"), span);
        };
        let k = self.pool(Const::Class(q.clone()));
        self.emit(Insn::New(k));
        self.emit(Insn::Dup);
        let ts = self.args(args)?;
        let cands: Vec<&CtorSig> = info.ctors.iter().collect();
        let c = match self.env.resolve(&cands, |c| &c.params, &ts) {
            Ok(c) => c.clone(),
            Err(true) => return err(format!("reference to {q} constructor is ambiguous"), span),
            Err(false) => {
                let list = ts.iter().map(type_name).collect::<Vec<_>>().join(",");
                return err(format!("no applicable constructor: {q}({list})"), span);
            }
        };
        let mut params = c.params.clone();
        if c.private && info.outer.is_some() && self.class.name != q {
            let extra = match self.variant {
                Variant::A => Type::Class(super::synthetic_class_name(&self.top.name)),
                Variant::B => Type::Class(q.clone()),
            };
            self.wrappers.insert((q.clone(), c.params.clone()));
            self.emit(Insn::AconstNull);
            params.push(extra);
        }
        let m = self.method_ref(&q, "<init>", &params, &Type::Void);
        self.emit(Insn::InvokeSpecial(m));
        Ok(Type::Class(q))
    }

    /// Emits an explicit or implicit superclass constructor call.
    pub fn super_call(&mut self, args: &[Expr], span: Span) -> CResult<()> {
        let sup = self.class.sup.clone().unwrap_or_else(|| "Object".into());
        self.emit(Insn::Aload(0));
        let ts = self.args(args)?;
        let info = self.env.get(&sup).expect("superclass registered");
        let cands: Vec<&CtorSig> = info.ctors.iter().collect();
        let c = match self.env.resolve(&cands, |c| &c.params, &ts) {
            Ok(c) => c.clone(),
            Err(true) => return err(format!("reference to {sup} constructor is ambiguous"), span),
            Err(false) => {
                let list = ts.iter().map(type_name).collect::<Vec<_>>().join(",");
                return err(format!("no applicable constructor: {sup}({list})"), span);
            }
        };
        let m = self.method_ref(&sup, "<init>", &c.params, &Type::Void);
        self.emit(Insn::InvokeSpecial(m));
        Ok(())
    }

    /// `this.f = init` for an instance field initializer.
    pub fn instance_init(&mut self, f: &FieldSig, init: &Expr) -> CResult<()> {
        self.emit(Insn::Aload(0));
        let t = self.expr(init)?;
        self.check_assignable(&t, &f.ty, init.span)?;
        let k = self.field_ref(&self.class.name.clone(), f);
        self.emit(Insn::PutField(k));
        Ok(())
    }

    /// `C.f = init` for a static field initializer.
    pub fn static_init(&mut self, f: &FieldSig, init: &Expr) -> CResult<()> {
        let t = self.expr(init)?;
        self.check_assignable(&t, &f.ty, init.span)?;
        let k = self.field_ref(&self.class.name.clone(), f);
        self.emit(Insn::PutStatic(k));
        Ok(())
    }

    pub fn finish(&mut self, live: bool, body_end: Span) -> CResult<()> {
        if live {
            if self.ret != Type::Void {
                return err("missing return statement", body_end);
            }
            self.emit(Insn::Return);
        }
        Ok(())
    }

    fn binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr, span: Span) -> CResult<Type> {
        if op == BinOp::Add {
            return match self.add_chain(lhs, rhs, span)? {
                Sum::Value(t, _) => Ok(t),
                Sum::Concat => {
                    if self.variant == Variant::A {
                        self.emit(Insn::BuilderStr);
                    }
                    Ok(Type::Str)
                }
            };
        }
        let lt = self.expr(lhs)?;
        let rt = self.expr(rhs)?;
        let bad = || {
            err(
                format!(
                    "bad operand types for binary operator '{}': {} and {}",
                    op.symbol(),
                    type_name(&lt),
                    type_name(&rt)
                ),
                span,
            )
        };
        match op {
            BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
                if lt != Type::Int || rt != Type::Int {
                    return bad();
                }
                self.emit(match op {
                    BinOp::Sub => Insn::Sub,
                    BinOp::Mul => Insn::Mul,
                    BinOp::Div => Insn::Div,
                    _ => Insn::Rem,
                });
                Ok(Type::Int)
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                if lt != Type::Int || rt != Type::Int {
                    return bad();
                }
                self.emit(match op {
                    BinOp::Lt => Insn::CmpLt,
                    BinOp::Le => Insn::CmpLe,
                    BinOp::Gt => Insn::CmpGt,
                    _ => Insn::CmpGe,
                });
                Ok(Type::Bool)
            }
            BinOp::Eq | BinOp::Ne => {
                let ok = (lt == rt && is_int_like(&lt))
                    || (lt.is_reference()
                        && rt.is_reference()
                        && (self.env.assignable(&lt, &rt) || self.env.assignable(&rt, &lt)));
                if !ok {
                    return err(format!("incomparable types: {} and {}", type_name(&lt), type_name(&rt)), span);
                }
                self.emit(if op == BinOp::Eq { Insn::CmpEq } else { Insn::CmpNe });
                Ok(Type::Bool)
            }
            BinOp::Add => unreachable!(),
        }
    }

    /// Left-nested `+` chain. Under variant A a string chain shares one
    /// builder; the builder is opened by inserting in front of the first
    /// operand's code, which is safe because expressions contain no jumps.
    fn add_chain(&mut self, lhs: &Expr, rhs: &Expr, span: Span) -> CResult<Sum> {
        let start = self.code.len();
        let left = match &lhs.kind {
            ExprKind::Binary { op: BinOp::Add, lhs: l, rhs: r } => self.add_chain(l, r, lhs.span)?,
            _ => Sum::Value(self.expr(lhs)?, start),
        };
        let lhs_end = self.code.len();
        let rt = self.expr(rhs)?;
        if rt == Type::Void {
            return err("'void' type not allowed here", rhs.span);
        }
        match left {
            Sum::Concat => {
                self.emit(match self.variant {
                    Variant::A => Insn::BuilderAppend(ValKind::of(&rt)),
                    Variant::B => Insn::Concat(ValKind::S, ValKind::of(&rt)),
                });
                Ok(Sum::Concat)
            }
            Sum::Value(lt, start) => {
                if lt == Type::Void {
                    return err("'void' type not allowed here", lhs.span);
                }
                if lt == Type::Str || rt == Type::Str {
                    match self.variant {
                        Variant::A => {
                            self.code.insert(lhs_end, Insn::BuilderAppend(ValKind::of(&lt)));
                            self.code.insert(start, Insn::BuilderNew);
                            self.emit(Insn::BuilderAppend(ValKind::of(&rt)));
                        }
                        Variant::B => {
                            self.emit(Insn::Concat(ValKind::of(&lt), ValKind::of(&rt)));
                        }
                    }
                    Ok(Sum::Concat)
                } else if lt == Type::Int && rt == Type::Int {
                    self.emit(Insn::Add);
                    Ok(Sum::Value(Type::Int, start))
                } else {
                    err(
                        format!("bad operand types for binary operator '+': {} and {}", type_name(&lt), type_name(&rt)),
                        span,
                    )
                }
            }
        }
    }
}

enum Sum {
    /// Non-string value whose code starts at the given offset.
    Value(Type, usize),
    /// Open string concatenation.
    Concat,
}
