//! Method body emission from the structured form.

use std::collections::{BTreeMap, BTreeSet};

use super::emit::{CastMode, LocalNames, Statics, Style};
use super::ir::*;
use super::types::Typing;
use crate::compiler::env::{Env, BUILDER};
use crate::lang::*;
use crate::vm::*;

/// Per-class emission context.
pub(super) struct ClassCx<'a> {
    pub style: &'a Style,
    pub env: &'a Env,
    pub top: &'a str,
    pub class: &'a str,
    pub outer: Option<&'a str>,
    pub synthetic: &'a BTreeSet<String>,
}

fn ex(kind: ExprKind) -> Expr {
    Expr::synth(kind)
}

fn st(kind: StmtKind) -> Stmt {
    Stmt::synth(kind)
}

fn name(n: &str) -> Expr {
    ex(ExprKind::Name(n.to_string()))
}

pub(super) fn int_lit(n: i32) -> Expr {
    if n < 0 {
        ex(ExprKind::Unary { op: UnOp::Neg, operand: Box::new(ex(ExprKind::Int(-(n as i64)))) })
    } else {
        ex(ExprKind::Int(n as i64))
    }
}

pub(super) fn const_lit(v: &ConstValue) -> Expr {
    match v {
        ConstValue::Int(n) => int_lit(*n),
        ConstValue::Bool(b) => ex(ExprKind::Bool(*b)),
        ConstValue::Str(s) => ex(ExprKind::Str(s.clone())),
    }
}

impl ClassCx<'_> {
    /// Class name as written in the output.
    pub fn class_name(&self, n: &str) -> String {
        if self.style.full_names {
            return n.to_string();
        }
        if n == self.top {
            return n.rsplit('.').next().unwrap_or(n).to_string();
        }
        match n.strip_prefix(self.top).and_then(|r| r.strip_prefix('.')) {
            Some(rest) => rest.to_string(),
            None => n.to_string(),
        }
    }

    pub fn ty(&self, t: &Type) -> Type {
        match t {
            Type::Class(n) => Type::Class(self.class_name(n)),
            other => other.clone(),
        }
    }

    fn class_path(&self, n: &str) -> Expr {
        let printed = self.class_name(n);
        let mut parts = printed.split('.');
        let mut e = name(parts.next().unwrap_or_default());
        for p in parts {
            e = ex(ExprKind::Field { target: Box::new(e), name: p.to_string() });
        }
        e
    }

    fn bare_candidates(&self, mname: &str) -> Vec<Vec<Type>> {
        let own = self.env.methods_named(self.class, mname);
        if !own.is_empty() {
            return own.into_iter().map(|m| m.params.clone()).collect();
        }
        match self.outer {
            Some(o) => {
                self.env.methods_named(o, mname).into_iter().filter(|m| m.is_static).map(|m| m.params.clone()).collect()
            }
            None => Vec::new(),
        }
    }

    fn bare_resolves_to(&self, m: &MethodRef) -> bool {
        let own = self.env.methods_named(self.class, &m.name);
        let found = if own.is_empty() {
            self.outer.map(|o| self.env.methods_named(o, &m.name)).unwrap_or_default()
        } else {
            own
        };
        found.iter().any(|x| x.owner == m.owner && x.params == m.params)
    }

    fn ctor_candidates(&self, class: &str) -> Vec<Vec<Type>> {
        self.env.get(class).map(|c| c.ctors.iter().map(|k| k.params.clone()).collect()).unwrap_or_default()
    }
}

type Path = Vec<(usize, usize)>;

pub(super) struct Body<'a, 'c> {
    cx: &'c ClassCx<'a>,
    t: Typing<'a>,
    names: BTreeMap<u16, String>,
    visible: BTreeSet<String>,
    decls: BTreeMap<(Path, usize), Vec<(u16, bool)>>,
}

/// Emits a method body. Returns parameter declarations and the block.
pub(super) fn emit_body(
    cx: &ClassCx<'_>,
    m: &MethodInfo,
    mut stmts: Vec<IStmt>,
) -> Result<(Vec<Param>, Block), String> {
    let t = Typing::infer(cx.env, cx.class, m, &mut stmts, cx.style.literal_int);
    let first = u16::from(!m.flags.is_static);
    let mut names = BTreeMap::new();
    let mut params = Vec::new();
    for (i, p) in m.params.iter().enumerate() {
        let n = m.param_names.get(i).cloned().unwrap_or_else(|| format!("p{i}"));
        names.insert(first + i as u16, n.clone());
        params.push(Param { ty: cx.ty(p), name: n, span: Span::default() });
    }
    let mut order = Vec::new();
    collect_slots(&stmts, &mut order);
    let mut k = 0;
    for s in order {
        if names.contains_key(&s) || (s == 0 && !m.flags.is_static) {
            continue;
        }
        let n = match cx.style.locals {
            LocalNames::Slot(prefix) => format!("{prefix}{s}"),
            LocalNames::Seq(prefix) => format!("{prefix}{k}"),
        };
        k += 1;
        names.insert(s, n);
    }
    let visible = names.values().cloned().collect();
    let mut catch_slots = BTreeSet::new();
    visit_stmts(&stmts, &mut |s| {
        if let IStmt::Try { slot, .. } = s {
            catch_slots.insert(*slot);
        }
    });
    let mut occ: BTreeMap<u16, Vec<(Path, usize, bool)>> = BTreeMap::new();
    record(&stmts, &mut Vec::new(), &mut occ);
    let mut decls: BTreeMap<(Path, usize), Vec<(u16, bool)>> = BTreeMap::new();
    for (s, list) in occ {
        if s < first + m.params.len() as u16 || catch_slots.contains(&s) {
            continue;
        }
        let lcp = list.iter().skip(1).fold(list[0].0.clone(), |acc, (p, _, _)| {
            acc.iter().zip(p).take_while(|(a, b)| a == b).map(|(a, _)| *a).collect()
        });
        let idx = list.iter().map(|(p, i, _)| if p.len() > lcp.len() { p[lcp.len()].0 } else { *i }).min().unwrap_or(0);
        let (p0, i0, clean) = &list[0];
        let at_store = *clean && *p0 == lcp && *i0 == idx;
        decls.entry((lcp, idx)).or_default().push((s, at_store));
    }
    let mut b = Body { cx, t, names, visible, decls };
    let block = b.block(&stmts, &mut Vec::new())?;
    Ok((params, block))
}

fn collect_slots(stmts: &[IStmt], out: &mut Vec<u16>) {
    visit_stmts(stmts, &mut |s| {
        if let IStmt::Store(slot, _) | IStmt::Try { slot, .. } = s {
            if !out.contains(slot) {
                out.push(*slot);
            }
        }
        for e in s.exprs() {
            e.visit(&mut |x| {
                if let IExpr::Local(l) = x {
                    if !out.contains(l) {
                        out.push(*l);
                    }
                }
            });
        }
    });
}

fn mentions(e: &IExpr, slot: u16) -> bool {
    let mut found = false;
    e.visit(&mut |x| found |= *x == IExpr::Local(slot));
    found
}

fn record(stmts: &[IStmt], path: &mut Path, occ: &mut BTreeMap<u16, Vec<(Path, usize, bool)>>) {
    for (i, s) in stmts.iter().enumerate() {
        let mut here = BTreeSet::new();
        if let IStmt::Store(slot, e) = s {
            occ.entry(*slot).or_default().push((path.clone(), i, !mentions(e, *slot)));
            here.insert(*slot);
        }
        for e in s.exprs() {
            e.visit(&mut |x| {
                if let IExpr::Local(l) = x {
                    if here.insert(*l) {
                        occ.entry(*l).or_default().push((path.clone(), i, false));
                    }
                }
            });
        }
        for (bi, b) in s.blocks().into_iter().enumerate() {
            path.push((i, bi));
            record(b, path, occ);
            path.pop();
        }
    }
}

impl Body<'_, '_> {
    fn style(&self) -> &Style {
        self.cx.style
    }

    fn local(&self, s: u16) -> Result<String, String> {
        self.names.get(&s).cloned().ok_or_else(|| format!("unnamed local {s}"))
    }

    fn default_value(t: &Type) -> Expr {
        match t {
            Type::Int => ex(ExprKind::Int(0)),
            Type::Bool => ex(ExprKind::Bool(false)),
            _ => ex(ExprKind::Null),
        }
    }

    fn block(&mut self, stmts: &[IStmt], path: &mut Path) -> Result<Block, String> {
        let mut out = Vec::new();
        for (i, s) in stmts.iter().enumerate() {
            let mut declared_here = false;
            for (slot, at_store) in self.decls.get(&(path.clone(), i)).cloned().unwrap_or_default() {
                let ty = self.cx.ty(&self.t.slot(slot));
                let n = self.local(slot)?;
                match (at_store, s) {
                    (true, IStmt::Store(_, e)) => {
                        let init = self.expr(e)?;
                        out.push(st(StmtKind::Local { ty, name: n, init }));
                        declared_here = true;
                    }
                    _ => {
                        let init = Self::default_value(&ty);
                        out.push(st(StmtKind::Local { ty, name: n, init }));
                    }
                }
            }
            if !declared_here {
                out.push(self.stmt(s, path, i)?);
            }
        }
        Ok(Block::synth(out))
    }

    fn sub_block(&mut self, stmts: &[IStmt], path: &mut Path, i: usize, bi: usize) -> Result<Block, String> {
        path.push((i, bi));
        let b = self.block(stmts, path);
        path.pop();
        b
    }

    fn stmt(&mut self, s: &IStmt, path: &mut Path, i: usize) -> Result<Stmt, String> {
        Ok(st(match s {
            IStmt::Store(slot, e) => StmtKind::Assign { target: name(&self.local(*slot)?), value: self.expr(e)? },
            IStmt::PutStatic(f, v) => StmtKind::Assign { target: self.static_field(f), value: self.expr(v)? },
            IStmt::PutField(o, f, v) => StmtKind::Assign { target: self.instance_field(o, f)?, value: self.expr(v)? },
            IStmt::Expr(e) => StmtKind::Expr(self.expr(e)?),
            IStmt::Print(_, e) => StmtKind::Print(self.expr(e)?),
            IStmt::Return(e) => StmtKind::Return(e.as_ref().map(|e| self.expr(e)).transpose()?),
            IStmt::Throw(e) => StmtKind::Throw(self.expr(e)?),
            IStmt::SuperCall(m, args) => {
                let cands = self.cx.ctor_candidates(&m.owner);
                StmtKind::SuperCall(self.args(args, &m.params, &cands)?)
            }
            IStmt::If { cond, then, els, ifne } => {
                let then_b = self.sub_block(then, path, i, 0)?;
                let els_b = match els {
                    Some(e) => Some(self.else_branch(e, path, i)?),
                    None => None,
                };
                let mut cond = self.expr(cond)?;
                let (mut then_s, mut else_s) = (st(StmtKind::Block(then_b)), els_b);
                if self.style().invert_ifeq && !*ifne && else_s.is_some() {
                    if let ExprKind::Binary { op, .. } = &mut cond.kind {
                        if let Some(neg) = op.negated() {
                            *op = neg;
                            let e = else_s.take().unwrap();
                            let e = match e.kind {
                                StmtKind::If { .. } => st(StmtKind::Block(Block::synth(vec![e]))),
                                _ => e,
                            };
                            else_s = Some(then_s);
                            then_s = e;
                        }
                    }
                }
                StmtKind::If { cond, then_branch: Box::new(then_s), else_branch: else_s.map(Box::new) }
            }
            IStmt::While { cond, body } => {
                let body = self.sub_block(body, path, i, 0)?;
                let cond = match cond {
                    Some(c) => self.expr(c)?,
                    None => ex(ExprKind::Bool(true)),
                };
                StmtKind::While { cond, body: Box::new(st(StmtKind::Block(body))) }
            }
            IStmt::Try { body, catch_type, slot, handler } => {
                let body = self.sub_block(body, path, i, 0)?;
                let handler = self.sub_block(handler, path, i, 1)?;
                StmtKind::Try {
                    body,
                    catch_ty: self.cx.class_name(catch_type),
                    catch_name: self.local(*slot)?,
                    handler,
                }
            }
            IStmt::Break => StmtKind::Break,
            IStmt::Continue => StmtKind::Continue,
        }))
    }

    fn else_branch(&mut self, els: &[IStmt], path: &mut Path, i: usize) -> Result<Stmt, String> {
        let chain = self.style().else_if
            && els.len() == 1
            && matches!(els[0], IStmt::If { .. })
            && !self.decls.contains_key(&([path.clone(), vec![(i, 1)]].concat(), 0));
        let b = self.sub_block(els, path, i, 1)?;
        if chain {
            Ok(b.stmts.into_iter().next().unwrap())
        } else {
            Ok(st(StmtKind::Block(b)))
        }
    }

    fn shadowed(&self, n: &str) -> bool {
        self.visible.contains(n)
    }

    fn static_field(&self, f: &FieldRef) -> Expr {
        let own = f.owner == self.cx.class;
        let bare = match self.style().statics {
            Statics::Qualified => false,
            Statics::Minimal => own && !self.shadowed(&f.name),
            Statics::Bare => own,
        };
        if bare {
            name(&f.name)
        } else {
            ex(ExprKind::Field { target: Box::new(self.cx.class_path(&f.owner)), name: f.name.clone() })
        }
    }

    fn instance_field(&self, o: &IExpr, f: &FieldRef) -> Result<Expr, String> {
        if *o == IExpr::This && !self.style().explicit_this && !self.shadowed(&f.name) {
            return Ok(name(&f.name));
        }
        let target =
            self.receiver(o, |env, c| env.field(c, &f.name).is_some_and(|(i, _)| i.name == f.owner), &f.owner)?;
        Ok(ex(ExprKind::Field { target: Box::new(target), name: f.name.clone() }))
    }

    /// Receiver expression, cast to `owner` when its static type does not
    /// reach the member.
    fn receiver(&self, o: &IExpr, reaches: impl Fn(&Env, &str) -> bool, owner: &str) -> Result<Expr, String> {
        let e = self.expr(o)?;
        let ok = match self.t.type_of(o) {
            Type::Class(c) => reaches(self.cx.env, &c),
            _ => false,
        };
        if ok {
            Ok(e)
        } else {
            Ok(ex(ExprKind::Cast { ty: self.cx.ty(&Type::Class(owner.to_string())), expr: Box::new(e) }))
        }
    }

    fn args(&self, args: &[IExpr], params: &[Type], cands: &[Vec<Type>]) -> Result<Vec<Expr>, String> {
        let types: Vec<Type> = args.iter().map(|a| self.t.type_of(a)).collect();
        let cast = match self.style().casts {
            CastMode::Always => true,
            CastMode::Never => false,
            CastMode::WhenNeeded => {
                let refs: Vec<&Vec<Type>> = cands.iter().collect();
                !matches!(self.cx.env.resolve(&refs, |p| p.as_slice(), &types), Ok(p) if p.as_slice() == params)
            }
        };
        args.iter()
            .zip(params)
            .zip(&types)
            .map(|((a, p), t)| {
                let e = self.expr(a)?;
                if cast && p.is_reference() && t != p {
                    Ok(ex(ExprKind::Cast { ty: self.cx.ty(p), expr: Box::new(e) }))
                } else {
                    Ok(e)
                }
            })
            .collect()
    }

    fn expr(&self, e: &IExpr) -> Result<Expr, String> {
        let bx = |e: &IExpr| self.expr(e).map(Box::new);
        Ok(match e {
            IExpr::Int(n) => int_lit(*n),
            IExpr::Bool(b) => ex(ExprKind::Bool(*b)),
            IExpr::Str(s) => ex(ExprKind::Str(s.clone())),
            IExpr::Null => ex(ExprKind::Null),
            IExpr::This => ex(ExprKind::This),
            IExpr::Local(s) => name(&self.local(*s)?),
            IExpr::GetStatic(f) => self.static_field(f),
            IExpr::GetField(o, f) => self.instance_field(o, f)?,
            IExpr::Bin(op, a, b) => ex(ExprKind::Binary { op: *op, lhs: bx(a)?, rhs: bx(b)? }),
            IExpr::Neg(a) => ex(ExprKind::Unary { op: UnOp::Neg, operand: bx(a)? }),
            IExpr::Not(a) => ex(ExprKind::Unary { op: UnOp::Not, operand: bx(a)? }),
            IExpr::Concat(_, _, a, b) => ex(ExprKind::Binary { op: BinOp::Add, lhs: bx(a)?, rhs: bx(b)? }),
            IExpr::BuilderNew => ex(ExprKind::New { class: BUILDER.into(), args: Vec::new() }),
            IExpr::BuilderAppend(b, _, x) => {
                ex(ExprKind::Call { target: Some(bx(b)?), name: "append".into(), args: vec![self.expr(x)?] })
            }
            IExpr::BuilderStr(b) => {
                let mut ops = Vec::new();
                if self.style().fold_concat && appends(b, &mut ops) && ops.len() >= 2 {
                    let mut parts = Vec::new();
                    if self.t.type_of(ops[0]) != Type::Str && self.t.type_of(ops[1]) != Type::Str {
                        parts.push(ex(ExprKind::Str(String::new())));
                    }
                    for o in ops {
                        parts.push(self.expr(o)?);
                    }
                    let mut it = parts.into_iter();
                    let first = it.next().unwrap();
                    it.fold(first, |acc, x| {
                        ex(ExprKind::Binary { op: BinOp::Add, lhs: Box::new(acc), rhs: Box::new(x) })
                    })
                } else {
                    ex(ExprKind::Call { target: Some(bx(b)?), name: "toString".into(), args: Vec::new() })
                }
            }
            IExpr::StaticCall(m, args) => {
                let qualified = match self.style().statics {
                    Statics::Qualified => true,
                    Statics::Minimal => !self.cx.bare_resolves_to(m),
                    Statics::Bare => false,
                };
                let (target, cands) = if qualified {
                    let c =
                        self.cx.env.methods_named(&m.owner, &m.name).into_iter().map(|x| x.params.clone()).collect();
                    (Some(Box::new(self.cx.class_path(&m.owner))), c)
                } else {
                    (None, self.cx.bare_candidates(&m.name))
                };
                ex(ExprKind::Call { target, name: m.name.clone(), args: self.args(args, &m.params, &cands)? })
            }
            IExpr::VirtCall(r, m, args) => {
                let (target, cands) = if **r == IExpr::This && !self.style().explicit_this {
                    (None, self.cx.bare_candidates(&m.name))
                } else {
                    let has = |env: &Env, c: &str| {
                        env.methods_named(c, &m.name).iter().any(|x| x.params == m.params && x.owner == m.owner)
                    };
                    let recv = self.receiver(r, has, &m.owner)?;
                    let rc = match self.t.type_of(r) {
                        Type::Class(c) if has(self.cx.env, &c) => c,
                        _ => m.owner.clone(),
                    };
                    let c = self.cx.env.methods_named(&rc, &m.name).into_iter().map(|x| x.params.clone()).collect();
                    (Some(Box::new(recv)), c)
                };
                ex(ExprKind::Call { target, name: m.name.clone(), args: self.args(args, &m.params, &cands)? })
            }
            IExpr::New(m, args, w) => {
                let drop = match w {
                    None => false,
                    Some(Type::Class(c)) if self.style().only_marker_wrappers => self.cx.synthetic.contains(c),
                    Some(_) => !self.style().only_marker_wrappers,
                };
                let n = if drop { m.params.len() - 1 } else { m.params.len() };
                let cands = self.cx.ctor_candidates(&m.owner);
                let args = self.args(&args[..n.min(args.len())], &m.params[..n], &cands)?;
                ex(ExprKind::New { class: self.cx.class_name(&m.owner), args })
            }
            IExpr::Pending(_) => return Err("object used before construction".into()),
        })
    }
}

/// Operands appended to a fresh builder, in order.
fn appends<'e>(b: &'e IExpr, out: &mut Vec<&'e IExpr>) -> bool {
    match b {
        IExpr::BuilderNew => true,
        IExpr::BuilderAppend(inner, _, x) if appends(inner, out) => {
            out.push(x);
            true
        }
        _ => false,
    }
}
