//! Local variable typing and boolean constant recovery.

use std::collections::{BTreeMap, BTreeSet};

use super::ir::*;
use crate::compiler::env::{Env, BUILDER, NULL_TYPE};
use crate::lang::{BinOp, Type};
use crate::vm::*;

#[derive(Debug, Clone)]
enum Use {
    Method(MethodRef),
    Field(FieldRef),
    Param(Type),
}

/// Typing context of one method body.
pub struct Typing<'a> {
    pub env: &'a Env,
    pub class: String,
    pub ret: Type,
    pub slots: BTreeMap<u16, Type>,
    scalars: BTreeSet<u16>,
    bools: BTreeSet<u16>,
    forced_int: BTreeSet<u16>,
    uses: BTreeMap<u16, Vec<Use>>,
    stored: BTreeMap<u16, Type>,
    rewrite: bool,
}

fn null() -> Type {
    Type::Class(NULL_TYPE.into())
}

fn expected_of(k: ValKind) -> Option<Type> {
    match k {
        ValKind::Z => Some(Type::Bool),
        ValKind::I => Some(Type::Int),
        _ => None,
    }
}

impl<'a> Typing<'a> {
    /// Infers slot types for `m` and rewrites integer constants used as
    /// booleans. With `literal_int` a scalar local whose first assignment is
    /// an integer constant is typed `int` regardless of later evidence.
    pub fn infer(env: &'a Env, class: &str, m: &MethodInfo, stmts: &mut [IStmt], literal_int: bool) -> Typing<'a> {
        let mut t = Typing {
            env,
            class: class.to_string(),
            ret: m.ret.clone(),
            slots: BTreeMap::new(),
            scalars: BTreeSet::new(),
            bools: BTreeSet::new(),
            forced_int: BTreeSet::new(),
            uses: BTreeMap::new(),
            stored: BTreeMap::new(),
            rewrite: false,
        };
        let first = u16::from(!m.flags.is_static);
        let nparams = m.params.len() as u16;
        for (i, p) in m.params.iter().enumerate() {
            t.slots.insert(first + i as u16, p.clone());
        }
        for insn in &m.code {
            if let Insn::Istore(s) | Insn::Iload(s) = insn {
                t.scalars.insert(*s);
            }
        }
        let mut catch_slots = BTreeMap::new();
        visit_stmts(stmts, &mut |s| {
            if let IStmt::Try { slot, catch_type, .. } = s {
                catch_slots.insert(*slot, Type::Class(catch_type.clone()));
            }
        });
        if literal_int {
            let mut seen = BTreeSet::new();
            let forced = &mut t.forced_int;
            visit_stmts(stmts, &mut |s| {
                if let IStmt::Store(slot, e) = s {
                    if seen.insert(*slot) && matches!(e, IExpr::Int(_)) {
                        forced.insert(*slot);
                    }
                }
            });
        }
        let is_param = |s: u16| s >= first && s < first + nparams;
        for s in t.scalars.clone() {
            if !is_param(s) {
                t.slots.insert(s, Type::Int);
            }
        }
        for (s, ty) in &catch_slots {
            t.slots.insert(*s, ty.clone());
        }
        // Fixpoint over boolean evidence and stored reference types.
        for _ in 0..8 {
            let before = (t.bools.clone(), t.stored.clone());
            t.uses.clear();
            for s in stmts.iter_mut() {
                t.stmt(s);
            }
            for b in t.bools.clone() {
                t.slots.insert(b, Type::Bool);
            }
            for (s, ty) in t.stored.clone() {
                if !t.scalars.contains(&s) && !is_param(s) && !catch_slots.contains_key(&s) {
                    t.slots.insert(s, ty);
                }
            }
            if (t.bools.clone(), t.stored.clone()) == before {
                break;
            }
        }
        // Choose declared reference types that satisfy every use.
        let refs: Vec<u16> = t.stored.keys().copied().collect();
        for s in refs {
            if t.scalars.contains(&s) || is_param(s) || catch_slots.contains_key(&s) {
                continue;
            }
            let chosen = t.choose(s);
            t.slots.insert(s, chosen);
        }
        t.rewrite = true;
        for s in stmts.iter_mut() {
            t.stmt(s);
        }
        t
    }

    pub fn slot(&self, s: u16) -> Type {
        self.slots.get(&s).cloned().unwrap_or_else(Type::object)
    }

    fn choose(&self, s: u16) -> Type {
        let uses = self.uses.get(&s).cloned().unwrap_or_default();
        let mut base = self.stored.get(&s).cloned().unwrap_or_else(null);
        if base == null() {
            base = match uses.first() {
                Some(Use::Method(m)) => Type::Class(m.owner.clone()),
                Some(Use::Field(f)) => Type::Class(f.owner.clone()),
                Some(Use::Param(p)) => p.clone(),
                None => Type::object(),
            };
        }
        for cand in self.chain(&base) {
            if uses.iter().all(|u| self.satisfies(&cand, u)) {
                return cand;
            }
        }
        base
    }

    /// `t` followed by its supertypes.
    pub fn chain(&self, t: &Type) -> Vec<Type> {
        match t {
            Type::Str => vec![Type::Str, Type::object()],
            Type::Class(c) => {
                let mut v = Vec::new();
                let mut cur = Some(c.clone());
                while let Some(n) = cur {
                    if v.len() > self.env.classes.len() + 1 {
                        break;
                    }
                    cur = self.env.get(&n).and_then(|i| i.sup.clone());
                    v.push(Type::Class(n));
                }
                v
            }
            other => vec![other.clone()],
        }
    }

    fn satisfies(&self, t: &Type, u: &Use) -> bool {
        let Type::Class(c) = t else {
            return matches!(u, Use::Param(p) if self.env.assignable(t, p));
        };
        match u {
            Use::Method(m) => self
                .env
                .methods_named(c, &m.name)
                .into_iter()
                .find(|x| x.params == m.params)
                .is_some_and(|x| x.owner == m.owner),
            Use::Field(f) => self.env.field(c, &f.name).is_some_and(|(o, _)| o.name == f.owner),
            Use::Param(p) => self.env.assignable(t, p),
        }
    }

    fn lub(&self, a: &Type, b: &Type) -> Type {
        if *a == null() {
            return b.clone();
        }
        if *b == null() || a == b {
            return a.clone();
        }
        match (a, b) {
            (Type::Class(_), Type::Class(_)) => {
                for c in self.chain(a) {
                    if self.env.assignable(b, &c) {
                        return c;
                    }
                }
                Type::object()
            }
            _ => Type::object(),
        }
    }

    /// Static type of an expression under the current slot typing.
    pub fn type_of(&self, e: &IExpr) -> Type {
        match e {
            IExpr::Int(_) | IExpr::Neg(_) => Type::Int,
            IExpr::Bool(_) | IExpr::Not(_) => Type::Bool,
            IExpr::Str(_) | IExpr::Concat(..) | IExpr::BuilderStr(_) => Type::Str,
            IExpr::Null | IExpr::Pending(_) => null(),
            IExpr::This => Type::Class(self.class.clone()),
            IExpr::Local(s) => {
                if self.bools.contains(s) {
                    Type::Bool
                } else {
                    self.slot(*s)
                }
            }
            IExpr::GetStatic(f) | IExpr::GetField(_, f) => f.ty.clone(),
            IExpr::Bin(op, _, _) => {
                if op.is_comparison() {
                    Type::Bool
                } else {
                    Type::Int
                }
            }
            IExpr::BuilderNew | IExpr::BuilderAppend(..) => Type::Class(BUILDER.into()),
            IExpr::StaticCall(m, _) | IExpr::VirtCall(_, m, _) => m.ret.clone(),
            IExpr::New(m, _, _) => Type::Class(m.owner.clone()),
        }
    }

    fn note_use(&mut self, e: &IExpr, u: Use) {
        if let IExpr::Local(s) = e {
            self.uses.entry(*s).or_default().push(u);
        }
    }

    fn stmt(&mut self, s: &mut IStmt) {
        match s {
            IStmt::Store(slot, e) => {
                let slot = *slot;
                if self.scalars.contains(&slot) {
                    if self.type_of(e) == Type::Bool && !self.forced_int.contains(&slot) {
                        self.bools.insert(slot);
                    }
                    let exp = self.bools.contains(&slot).then_some(Type::Bool);
                    self.expr(e, exp);
                } else {
                    let t = self.type_of(e);
                    let cur = self.stored.get(&slot).cloned().unwrap_or_else(null);
                    let l = self.lub(&cur, &t);
                    self.stored.insert(slot, l);
                    self.expr(e, None);
                }
            }
            IStmt::PutStatic(f, v) => {
                let t = f.ty.clone();
                self.expr(v, Some(t));
            }
            IStmt::PutField(o, f, v) => {
                self.note_use(o, Use::Field(f.clone()));
                self.expr(o, None);
                let t = f.ty.clone();
                self.expr(v, Some(t));
            }
            IStmt::Expr(e) | IStmt::Throw(e) => self.expr(e, None),
            IStmt::Print(k, e) => self.expr(e, expected_of(*k)),
            IStmt::Return(Some(e)) => {
                let r = self.ret.clone();
                self.expr(e, Some(r));
            }
            IStmt::SuperCall(m, args) => {
                let params = m.params.clone();
                self.args(args, &params);
            }
            IStmt::If { cond, .. } | IStmt::While { cond: Some(cond), .. } => self.expr(cond, Some(Type::Bool)),
            _ => {}
        }
        for b in s.blocks_mut() {
            for st in b.iter_mut() {
                self.stmt(st);
            }
        }
    }

    fn args(&mut self, args: &mut [IExpr], params: &[Type]) {
        for (a, p) in args.iter_mut().zip(params) {
            if p.is_reference() {
                self.note_use(a, Use::Param(p.clone()));
            }
            self.expr(a, Some(p.clone()));
        }
    }

    fn expr(&mut self, e: &mut IExpr, expected: Option<Type>) {
        if expected == Some(Type::Bool) {
            match e {
                IExpr::Local(s) if self.scalars.contains(s) && !self.forced_int.contains(s) => {
                    self.bools.insert(*s);
                }
                IExpr::Int(n @ (0 | 1)) if self.rewrite => {
                    *e = IExpr::Bool(*n == 1);
                    return;
                }
                _ => {}
            }
        }
        match e {
            IExpr::GetField(o, f) => {
                self.note_use(o, Use::Field(f.clone()));
                self.expr(o, None);
            }
            IExpr::Bin(op, a, b) => {
                if matches!(op, BinOp::Eq | BinOp::Ne) {
                    let ta = self.type_of(a);
                    let tb = self.type_of(b);
                    let ea = (tb == Type::Bool).then_some(Type::Bool);
                    let eb = (ta == Type::Bool).then_some(Type::Bool);
                    self.expr(a, ea);
                    self.expr(b, eb);
                } else {
                    self.expr(a, Some(Type::Int));
                    self.expr(b, Some(Type::Int));
                }
            }
            IExpr::Neg(a) => self.expr(a, Some(Type::Int)),
            IExpr::Not(a) => self.expr(a, Some(Type::Bool)),
            IExpr::Concat(k0, k1, a, b) => {
                let (x, y) = (expected_of(*k0), expected_of(*k1));
                self.expr(a, x);
                self.expr(b, y);
            }
            IExpr::BuilderAppend(b, k, x) => {
                self.expr(b, None);
                let exp = expected_of(*k);
                self.expr(x, exp);
            }
            IExpr::BuilderStr(b) => self.expr(b, None),
            IExpr::StaticCall(m, args) => {
                let params = m.params.clone();
                self.args(args, &params);
            }
            IExpr::New(m, args, _) => {
                let params = m.params.clone();
                self.args(args, &params);
            }
            IExpr::VirtCall(r, m, args) => {
                self.note_use(r, Use::Method(m.clone()));
                self.expr(r, None);
                let params = m.params.clone();
                self.args(args, &params);
            }
            _ => {}
        }
    }
}
