use std::fmt;

use super::model::*;
use crate::lang::Type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyError {
    pub class: String,
    /// `owner.name(T..)` of the offending method, empty for class-level errors.
    pub method: String,
    pub offset: Option<usize>,
    pub message: String,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(o) => write!(f, "{} @{}: {}", self.method, o, self.message),
            None if self.method.is_empty() => write!(f, "{}: {}", self.class, self.message),
            None => write!(f, "{}: {}", self.method, self.message),
        }
    }
}

/// `(pops, pushes)` of an instruction, or None if its pool operand is
/// missing or of the wrong kind.
pub fn stack_effect(insn: &Insn, bc: &BytecodeClass) -> Option<(usize, usize)> {
    let call = |k: u32, receiver: bool| {
        bc.method_ref(k).map(|m| {
            let pops = m.params.len() + usize::from(receiver);
            (pops, usize::from(m.ret != Type::Void))
        })
    };
    Some(match *insn {
        Insn::Iconst(_) | Insn::AconstNull | Insn::Iload(_) | Insn::Aload(_) | Insn::BuilderNew => (0, 1),
        Insn::Ldc(k) => match bc.pool.get(k as usize)? {
            Const::Int(_) | Const::Str(_) => (0, 1),
            _ => return None,
        },
        Insn::Istore(_) | Insn::Astore(_) | Insn::Pop | Insn::Print(_) => (1, 0),
        Insn::GetStatic(k) => {
            bc.field_ref(k)?;
            (0, 1)
        }
        Insn::PutStatic(k) => {
            bc.field_ref(k)?;
            (1, 0)
        }
        Insn::GetField(k) => {
            bc.field_ref(k)?;
            (1, 1)
        }
        Insn::PutField(k) => {
            bc.field_ref(k)?;
            (2, 0)
        }
        Insn::Add
        | Insn::Sub
        | Insn::Mul
        | Insn::Div
        | Insn::Rem
        | Insn::CmpEq
        | Insn::CmpNe
        | Insn::CmpLt
        | Insn::CmpLe
        | Insn::CmpGt
        | Insn::CmpGe
        | Insn::Concat(..)
        | Insn::BuilderAppend(_) => (2, 1),
        Insn::Neg | Insn::Not | Insn::BuilderStr => (1, 1),
        Insn::IfEq(_) | Insn::IfNe(_) => (1, 0),
        Insn::Goto(_) | Insn::Return => (0, 0),
        Insn::InvokeStatic(k) => call(k, false)?,
        Insn::InvokeVirt(k) | Insn::InvokeSpecial(k) => call(k, true)?,
        Insn::New(k) => {
            bc.class_ref(k)?;
            (0, 1)
        }
        Insn::Dup => (1, 2),
        Insn::Throw | Insn::IReturn | Insn::AReturn => (1, 0),
    })
}

/// Largest operand-stack depth reached on any path, assuming the code
/// verifies (unknown operands count as no effect).
pub fn max_stack(code: &[Insn], handlers: &[HandlerEntry], bc: &BytecodeClass) -> usize {
    let n = code.len();
    let mut depth: Vec<Option<usize>> = vec![None; n];
    let mut work = vec![(0usize, 0usize)];
    work.extend(handlers.iter().map(|h| (h.range.target, 1)));
    let mut max = 0;
    while let Some((pc, d)) = work.pop() {
        if pc >= n || depth[pc].is_some() {
            continue;
        }
        depth[pc] = Some(d);
        max = max.max(d);
        let insn = &code[pc];
        let (pops, pushes) = stack_effect(insn, bc).unwrap_or((0, 0));
        let nd = d.saturating_sub(pops) + pushes;
        max = max.max(nd);
        if let Some(t) = insn.jump_target() {
            work.push((t, nd));
        }
        if !insn.is_terminator() {
            work.push((pc + 1, nd));
        }
    }
    max
}

/// Checks every class in `bc` (including nested classes).
pub fn verify(bc: &BytecodeClass) -> Result<(), Vec<VerifyError>> {
    let mut errs = Vec::new();
    for c in bc.all_classes() {
        for m in &c.methods {
            verify_method(c, m, &mut errs);
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn verify_method(c: &BytecodeClass, m: &MethodInfo, errs: &mut Vec<VerifyError>) {
    let key = m.key();
    let mut err = |offset: Option<usize>, message: String| {
        errs.push(VerifyError { class: c.name.clone(), method: key.clone(), offset, message })
    };
    let n = m.code.len();
    if n == 0 {
        err(None, "empty method body".into());
        return;
    }
    if m.arg_slots() > m.max_locals as usize {
        err(None, "max_locals smaller than argument slots".into());
    }
    let mut structural = false;
    for (i, insn) in m.code.iter().enumerate() {
        if let Some(t) = insn.jump_target() {
            if t >= n {
                err(Some(i), format!("jump target {t} out of range"));
                structural = true;
            }
        }
        if stack_effect(insn, c).is_none() {
            err(Some(i), format!("pool operand of {} is missing or of the wrong kind", insn.mnemonic()));
            structural = true;
        }
        if let Insn::Iload(s) | Insn::Istore(s) | Insn::Aload(s) | Insn::Astore(s) = insn {
            if *s >= m.max_locals {
                err(Some(i), format!("local slot {s} exceeds max_locals"));
            }
        }
    }
    for h in &m.handlers {
        let r = h.range;
        if !(r.start < r.end && r.end <= n && r.target < n) {
            err(None, format!("handler range {}..{} -> {} out of bounds", r.start, r.end, r.target));
            structural = true;
        }
    }
    if structural {
        return;
    }
    let mut depth: Vec<Option<usize>> = vec![None; n];
    let mut work = vec![(0usize, 0usize)];
    for h in &m.handlers {
        work.push((h.range.target, 1));
    }
    while let Some((pc, d)) = work.pop() {
        match depth[pc] {
            Some(prev) if prev == d => continue,
            Some(prev) => {
                err(Some(pc), format!("inconsistent stack depth at join: {prev} vs {d}"));
                continue;
            }
            None => depth[pc] = Some(d),
        }
        let insn = &m.code[pc];
        let (pops, pushes) = stack_effect(insn, c).unwrap();
        if d < pops {
            err(Some(pc), format!("stack underflow in {}", insn.mnemonic()));
            continue;
        }
        let nd = d - pops + pushes;
        if nd > m.max_stack as usize {
            err(Some(pc), format!("stack depth {nd} exceeds max_stack {}", m.max_stack));
        }
        if let Some(t) = insn.jump_target() {
            work.push((t, nd));
        }
        if !insn.is_terminator() {
            if pc + 1 >= n {
                err(Some(pc), "control falls off the end of the code".into());
            } else {
                work.push((pc + 1, nd));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method(code: Vec<Insn>) -> BytecodeClass {
        let mut c = BytecodeClass::new("p.T", "Object");
        c.methods.push(MethodInfo {
            owner: "p.T".into(),
            name: "f".into(),
            params: vec![],
            param_names: vec![],
            ret: Type::Void,
            flags: Flags { is_static: true, ..Flags::default() },
            max_stack: 2,
            max_locals: 1,
            code,
            handlers: vec![],
        });
        c
    }

    #[test]
    fn accepts_simple_code() {
        assert!(verify(&method(vec![Insn::Iconst(1), Insn::Print(ValKind::I), Insn::Return])).is_ok());
    }

    #[test]
    fn rejects_underflow() {
        let errs = verify(&method(vec![Insn::Pop, Insn::Return])).unwrap_err();
        assert_eq!(errs[0].offset, Some(0));
    }

    #[test]
    fn rejects_bad_jump() {
        assert!(verify(&method(vec![Insn::Goto(7), Insn::Return])).is_err());
    }

    #[test]
    fn rejects_fall_off_end() {
        assert!(verify(&method(vec![Insn::Iconst(1), Insn::Pop])).is_err());
    }

    #[test]
    fn rejects_unbalanced_join() {
        let code = vec![Insn::Iconst(0), Insn::IfEq(3), Insn::Iconst(1), Insn::Return];
        assert!(verify(&method(code)).is_err());
    }
}
