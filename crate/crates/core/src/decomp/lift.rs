//! Control-flow structuring and expression recovery from stack code.

use super::ir::*;
use crate::lang::{BinOp, Type};
use crate::vm::*;

pub type LiftResult<T> = Result<T, String>;

struct LoopCtx {
    cont: usize,
    exit: usize,
}

struct Lifter<'a> {
    top: &'a BytecodeClass,
    cls: &'a BytecodeClass,
    m: &'a MethodInfo,
    used: Vec<bool>,
    loops: Vec<LoopCtx>,
    pending: u32,
}

/// Recovers structured statements for one method. `cls` is the class that
/// owns the method (for pool lookups) and `top` the outermost class.
pub fn lift_method(top: &BytecodeClass, cls: &BytecodeClass, m: &MethodInfo) -> LiftResult<Vec<IStmt>> {
    let mut l = Lifter { top, cls, m, used: vec![false; m.handlers.len()], loops: Vec::new(), pending: 0 };
    l.region(0, m.code.len(), None)
}

/// Synthetic trailing parameter type when `r` targets an access wrapper.
pub fn wrapper_param(top: &BytecodeClass, r: &MethodRef) -> Option<Type> {
    let c = top.all_classes().into_iter().find(|c| c.name == r.owner)?;
    let m = c.method("<init>", &r.params)?;
    if m.flags.synthetic && !m.params.is_empty() {
        m.params.last().cloned()
    } else {
        None
    }
}

impl Lifter<'_> {
    fn code(&self) -> &[Insn] {
        &self.m.code
    }

    fn region(&mut self, start: usize, end: usize, loop_head: Option<usize>) -> LiftResult<Vec<IStmt>> {
        let mut out = Vec::new();
        let mut stack: Vec<IExpr> = Vec::new();
        let mut i = start;
        while i < end {
            if stack.is_empty() {
                if let Some((s, next)) = self.structure_at(i, end, loop_head)? {
                    out.push(s);
                    i = next;
                    continue;
                }
            }
            let insn = self.code()[i];
            match insn {
                Insn::IfEq(l) | Insn::IfNe(l) if l > i => {
                    let cond = stack.pop().ok_or("condition missing")?;
                    if !stack.is_empty() {
                        return Err(format!("values left on the stack at branch {i}"));
                    }
                    let (s, next) = self.branch(i, l, end, cond, matches!(insn, Insn::IfNe(_)))?;
                    out.push(s);
                    i = next;
                }
                Insn::Goto(t) => {
                    if !stack.is_empty() {
                        return Err(format!("values left on the stack at jump {i}"));
                    }
                    let ctx = self.loops.last().ok_or_else(|| format!("unstructured jump at {i}"))?;
                    if t == ctx.exit {
                        out.push(IStmt::Break);
                    } else if t == ctx.cont {
                        out.push(IStmt::Continue);
                    } else {
                        return Err(format!("unstructured jump at {i}"));
                    }
                    i += 1;
                }
                Insn::IfEq(_) | Insn::IfNe(_) => return Err(format!("unstructured backward branch at {i}")),
                _ => {
                    if let Some(s) = self.step(&mut stack, insn)? {
                        if !stack.is_empty() {
                            return Err(format!("statement with pending values at {i}"));
                        }
                        out.push(s);
                    }
                    i += 1;
                }
            }
        }
        if !stack.is_empty() {
            return Err(format!("values left on the stack at {end}"));
        }
        Ok(out)
    }

    /// Straight-line expression for the instruction range `[from, to)`.
    fn expr_range(&mut self, from: usize, to: usize) -> LiftResult<IExpr> {
        let mut stack = Vec::new();
        for i in from..to {
            if self.step(&mut stack, self.code()[i])?.is_some() {
                return Err(format!("statement inside condition at {i}"));
            }
        }
        match (stack.pop(), stack.is_empty()) {
            (Some(e), true) => Ok(e),
            _ => Err(format!("malformed condition at {from}")),
        }
    }

    fn structure_at(&mut self, i: usize, end: usize, loop_head: Option<usize>) -> LiftResult<Option<(IStmt, usize)>> {
        let code = self.code();
        // while (true): the furthest backward jump to i.
        let forever = if loop_head == Some(i) { None } else { (i + 1..end).rev().find(|&p| code[p] == Insn::Goto(i)) };
        // while (cond): GOTO to a condition that jumps back to i + 1.
        let cond_loop = match code[i] {
            Insn::Goto(x) if x > i && x < end => {
                let mut k = x;
                while k < end && code[k].jump_target().is_none() && !code[k].is_terminator() {
                    k += 1;
                }
                (k < end && code[k] == Insn::IfNe(i + 1)).then_some((x, k))
            }
            _ => None,
        };
        let loop_extent = forever.map(|g| g + 1).or(cond_loop.map(|(_, k)| k + 1));
        let handler = (0..self.m.handlers.len())
            .filter(|&h| !self.used[h] && self.m.handlers[h].range.start == i && self.m.handlers[h].range.end <= end)
            .max_by_key(|&h| (self.m.handlers[h].range.end, std::cmp::Reverse(h)));

        if let Some(h) = handler {
            let r = self.m.handlers[h].range;
            if loop_extent.is_none_or(|e| r.end >= e) {
                return self.try_stmt(h, end, loop_head).map(Some);
            }
        }
        if let Some(g) = forever {
            self.loops.push(LoopCtx { cont: i, exit: g + 1 });
            let body = self.region(i, g, Some(i));
            self.loops.pop();
            return Ok(Some((IStmt::While { cond: None, body: body? }, g + 1)));
        }
        if let Some((x, k)) = cond_loop {
            self.loops.push(LoopCtx { cont: x, exit: k + 1 });
            let body = self.region(i + 1, x, None);
            self.loops.pop();
            let cond = self.expr_range(x, k)?;
            return Ok(Some((IStmt::While { cond: Some(cond), body: body? }, k + 1)));
        }
        Ok(None)
    }

    fn try_stmt(&mut self, h: usize, end: usize, loop_head: Option<usize>) -> LiftResult<(IStmt, usize)> {
        self.used[h] = true;
        let entry = self.m.handlers[h].clone();
        let r = entry.range;
        // The body region starts at the same offset; a loop there belongs
        // inside the try.
        let inner_head = if loop_head == Some(r.start) { loop_head } else { None };
        let body = self.region(r.start, r.end, inner_head)?;
        let (handler_end, next) = match self.code().get(r.end) {
            Some(Insn::Goto(a)) if r.target == r.end + 1 && *a > r.target && *a <= end => (*a, *a),
            _ if r.target == r.end => (end, end),
            _ => return Err(format!("unrecognized handler layout at {}", r.target)),
        };
        let slot = match self.code().get(r.target) {
            Some(Insn::Astore(s)) => *s,
            _ => return Err(format!("handler at {} does not store the exception", r.target)),
        };
        let handler = self.region(r.target + 1, handler_end, None)?;
        Ok((IStmt::Try { body, catch_type: entry.catch_type, slot, handler }, next))
    }

    fn branch(&mut self, i: usize, l: usize, end: usize, cond: IExpr, ifne: bool) -> LiftResult<(IStmt, usize)> {
        if l > end {
            return Err(format!("branch at {i} leaves its region"));
        }
        let two_armed = match self.code()[l - 1] {
            Insn::Goto(m) if l - 1 > i && m >= l && m <= end => Some(m),
            _ => None,
        };
        match (ifne, two_armed) {
            (false, Some(m)) => {
                let then = self.region(i + 1, l - 1, None)?;
                let els = self.region(l, m, None)?;
                Ok((IStmt::If { cond, then, els: Some(els), ifne: false }, m))
            }
            (false, None) => {
                let then = self.region(i + 1, l, None)?;
                Ok((IStmt::If { cond, then, els: None, ifne: false }, l))
            }
            (true, Some(m)) => {
                let els = self.region(i + 1, l - 1, None)?;
                let then = self.region(l, m, None)?;
                Ok((IStmt::If { cond, then, els: Some(els), ifne: true }, m))
            }
            (true, None) => {
                let els = self.region(i + 1, l, None)?;
                let then = self.region(l, end, None)?;
                Ok((IStmt::If { cond, then, els: Some(els), ifne: true }, end))
            }
        }
    }

    fn pop(stack: &mut Vec<IExpr>) -> LiftResult<IExpr> {
        stack.pop().ok_or_else(|| "stack underflow".to_string())
    }

    fn pop_args(stack: &mut Vec<IExpr>, n: usize) -> LiftResult<Vec<IExpr>> {
        if stack.len() < n {
            return Err("stack underflow".into());
        }
        Ok(stack.split_off(stack.len() - n))
    }

    fn field(&self, k: u32) -> LiftResult<FieldRef> {
        self.cls.field_ref(k).cloned().ok_or_else(|| format!("bad field reference #{k}"))
    }

    fn method(&self, k: u32) -> LiftResult<MethodRef> {
        self.cls.method_ref(k).cloned().ok_or_else(|| format!("bad method reference #{k}"))
    }

    /// Executes one non-branching instruction symbolically; returns a
    /// completed statement if the instruction ends one.
    fn step(&mut self, stack: &mut Vec<IExpr>, insn: Insn) -> LiftResult<Option<IStmt>> {
        let bin = |op: BinOp, stack: &mut Vec<IExpr>| -> LiftResult<()> {
            let b = Self::pop(stack)?;
            let a = Self::pop(stack)?;
            stack.push(IExpr::Bin(op, Box::new(a), Box::new(b)));
            Ok(())
        };
        match insn {
            Insn::Iconst(n) => stack.push(IExpr::Int(n)),
            Insn::Ldc(k) => match self.cls.pool.get(k as usize) {
                Some(Const::Str(s)) => stack.push(IExpr::Str(s.clone())),
                Some(Const::Int(n)) => stack.push(IExpr::Int(*n)),
                _ => return Err(format!("bad constant #{k}")),
            },
            Insn::AconstNull => stack.push(IExpr::Null),
            Insn::Aload(0) if !self.m.flags.is_static => stack.push(IExpr::This),
            Insn::Iload(s) | Insn::Aload(s) => stack.push(IExpr::Local(s)),
            Insn::Istore(s) | Insn::Astore(s) => return Ok(Some(IStmt::Store(s, Self::pop(stack)?))),
            Insn::GetStatic(k) => stack.push(IExpr::GetStatic(self.field(k)?)),
            Insn::PutStatic(k) => return Ok(Some(IStmt::PutStatic(self.field(k)?, Self::pop(stack)?))),
            Insn::GetField(k) => {
                let o = Self::pop(stack)?;
                stack.push(IExpr::GetField(Box::new(o), self.field(k)?));
            }
            Insn::PutField(k) => {
                let v = Self::pop(stack)?;
                let o = Self::pop(stack)?;
                return Ok(Some(IStmt::PutField(o, self.field(k)?, v)));
            }
            Insn::Add => bin(BinOp::Add, stack)?,
            Insn::Sub => bin(BinOp::Sub, stack)?,
            Insn::Mul => bin(BinOp::Mul, stack)?,
            Insn::Div => bin(BinOp::Div, stack)?,
            Insn::Rem => bin(BinOp::Rem, stack)?,
            Insn::CmpEq => bin(BinOp::Eq, stack)?,
            Insn::CmpNe => bin(BinOp::Ne, stack)?,
            Insn::CmpLt => bin(BinOp::Lt, stack)?,
            Insn::CmpLe => bin(BinOp::Le, stack)?,
            Insn::CmpGt => bin(BinOp::Gt, stack)?,
            Insn::CmpGe => bin(BinOp::Ge, stack)?,
            Insn::Neg => {
                let a = Self::pop(stack)?;
                stack.push(IExpr::Neg(Box::new(a)));
            }
            Insn::Not => {
                let a = Self::pop(stack)?;
                stack.push(IExpr::Not(Box::new(a)));
            }
            Insn::Concat(k0, k1) => {
                let b = Self::pop(stack)?;
                let a = Self::pop(stack)?;
                stack.push(IExpr::Concat(k0, k1, Box::new(a), Box::new(b)));
            }
            Insn::BuilderNew => stack.push(IExpr::BuilderNew),
            Insn::BuilderAppend(k) => {
                let x = Self::pop(stack)?;
                let b = Self::pop(stack)?;
                stack.push(IExpr::BuilderAppend(Box::new(b), k, Box::new(x)));
            }
            Insn::BuilderStr => {
                let b = Self::pop(stack)?;
                stack.push(IExpr::BuilderStr(Box::new(b)));
            }
            Insn::InvokeStatic(k) => {
                let m = self.method(k)?;
                let args = Self::pop_args(stack, m.params.len())?;
                let void = m.ret == Type::Void;
                let e = IExpr::StaticCall(m, args);
                if void {
                    return Ok(Some(IStmt::Expr(e)));
                }
                stack.push(e);
            }
            Insn::InvokeVirt(k) => {
                let m = self.method(k)?;
                let args = Self::pop_args(stack, m.params.len())?;
                let recv = Self::pop(stack)?;
                let void = m.ret == Type::Void;
                let e = IExpr::VirtCall(Box::new(recv), m, args);
                if void {
                    return Ok(Some(IStmt::Expr(e)));
                }
                stack.push(e);
            }
            Insn::InvokeSpecial(k) => {
                let m = self.method(k)?;
                let args = Self::pop_args(stack, m.params.len())?;
                match Self::pop(stack)? {
                    IExpr::Pending(id) => {
                        let slot = stack
                            .iter_mut()
                            .rev()
                            .find(|e| **e == IExpr::Pending(id))
                            .ok_or("constructed object was not duplicated")?;
                        let w = wrapper_param(self.top, &m);
                        *slot = IExpr::New(m, args, w);
                    }
                    IExpr::This => return Ok(Some(IStmt::SuperCall(m, args))),
                    _ => return Err("constructor call on an unexpected receiver".into()),
                }
            }
            Insn::New(_) => {
                self.pending += 1;
                stack.push(IExpr::Pending(self.pending));
            }
            Insn::Dup => {
                let t = stack.last().cloned().ok_or("stack underflow")?;
                stack.push(t);
            }
            Insn::Pop => return Ok(Some(IStmt::Expr(Self::pop(stack)?))),
            Insn::Throw => return Ok(Some(IStmt::Throw(Self::pop(stack)?))),
            Insn::Return => return Ok(Some(IStmt::Return(None))),
            Insn::IReturn | Insn::AReturn => return Ok(Some(IStmt::Return(Some(Self::pop(stack)?)))),
            Insn::Print(k) => return Ok(Some(IStmt::Print(k, Self::pop(stack)?))),
            Insn::IfEq(_) | Insn::IfNe(_) | Insn::Goto(_) => unreachable!("handled by the structurer"),
        }
        Ok(None)
    }
}
