//! Bytecode shapes that the built-in backends are known to mishandle.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ir::*;
use super::lift::{lift_method, wrapper_param};
use super::types::Typing;
use crate::compiler::env::Env;
use crate::lang::Type;
use crate::vm::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// A string constant containing a line break.
    MultilineString,
    /// An exception handler whose protected range sits inside a loop.
    HandlerInLoop,
    /// A boolean local first assigned from a 0/1 constant and later used
    /// where only a boolean is accepted.
    BoolLiteralLocal,
    /// Construction through an access wrapper whose marker parameter is the
    /// constructed class itself.
    VariantBWrapperCall,
    /// A parameter named like an own static field the method touches.
    StaticSetterShadow,
    /// A static call whose bare method name resolves elsewhere or nowhere.
    ForeignStaticCall,
    /// A call that resolves to a different overload without its casts.
    OverloadCastElision,
}

impl Shape {
    pub const ALL: [Shape; 7] = [
        Shape::MultilineString,
        Shape::HandlerInLoop,
        Shape::BoolLiteralLocal,
        Shape::VariantBWrapperCall,
        Shape::StaticSetterShadow,
        Shape::ForeignStaticCall,
        Shape::OverloadCastElision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::MultilineString => "multiline-string",
            Shape::HandlerInLoop => "handler-in-loop",
            Shape::BoolLiteralLocal => "bool-literal-local",
            Shape::VariantBWrapperCall => "variant-b-wrapper-call",
            Shape::StaticSetterShadow => "static-setter-shadow",
            Shape::ForeignStaticCall => "foreign-static-call",
            Shape::OverloadCastElision => "overload-cast-elision",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    EmptyOutput,
    SyntacticError,
    Deceptive,
}

/// Members of `bc` (keyed like `C.m(int)`, or `C#f` for fields) that
/// exhibit `shape`.
pub fn detect(shape: Shape, bc: &BytecodeClass) -> BTreeSet<String> {
    let env = Env::from_bytecode(bc);
    let mut out = BTreeSet::new();
    for c in bc.all_classes() {
        if c.flags.synthetic {
            continue;
        }
        if shape == Shape::MultilineString {
            for f in &c.fields {
                if matches!(&f.constant, Some(ConstValue::Str(s)) if s.contains('\n')) {
                    out.insert(format!("{}#{}", c.name, f.name));
                }
            }
        }
        for m in c.methods.iter().filter(|m| !m.flags.synthetic) {
            if method_has(shape, bc, c, m, &env) {
                out.insert(m.key());
            }
        }
    }
    out
}

/// All shapes present in `bc`, with the members exhibiting each.
pub fn detect_all(bc: &BytecodeClass) -> BTreeMap<Shape, BTreeSet<String>> {
    Shape::ALL.iter().map(|&s| (s, detect(s, bc))).filter(|(_, v)| !v.is_empty()).collect()
}

fn method_has(shape: Shape, top: &BytecodeClass, c: &BytecodeClass, m: &MethodInfo, env: &Env) -> bool {
    match shape {
        Shape::MultilineString => m.code.iter().any(|i| match i {
            Insn::Ldc(k) => matches!(c.pool.get(*k as usize), Some(Const::Str(s)) if s.contains('\n')),
            _ => false,
        }),
        Shape::HandlerInLoop => m.handlers.iter().any(|h| {
            m.code
                .iter()
                .enumerate()
                .any(|(p, i)| matches!(i.jump_target(), Some(t) if t <= p && t <= h.range.start && p >= h.range.end))
        }),
        Shape::StaticSetterShadow => {
            let touched: BTreeSet<(String, Type)> = m
                .code
                .iter()
                .filter_map(|i| match i {
                    Insn::GetStatic(k) | Insn::PutStatic(k) => c.field_ref(*k),
                    _ => None,
                })
                .filter(|f| f.owner == c.name)
                .map(|f| (f.name.clone(), f.ty.clone()))
                .collect();
            m.param_names.iter().zip(&m.params).any(|(n, t)| touched.contains(&(n.clone(), t.clone())))
        }
        Shape::ForeignStaticCall => m.code.iter().any(|i| match i {
            Insn::InvokeStatic(k) => c.method_ref(*k).is_some_and(|r| !bare_reaches(env, c, top, r)),
            _ => false,
        }),
        Shape::VariantBWrapperCall => m.code.iter().any(|i| {
            match i {
            Insn::InvokeSpecial(k) => c.method_ref(*k).and_then(|r| wrapper_param(top, r)).is_some_and(|t| {
                !matches!(&t, Type::Class(n) if top.all_classes().iter().any(|x| &x.name == n && x.flags.synthetic))
            }),
            _ => false,
        }
        }),
        Shape::BoolLiteralLocal => lifted(top, c, m).is_some_and(|s| bool_literal_local(&s)),
        Shape::OverloadCastElision => lifted(top, c, m).is_some_and(|mut s| {
            let t = Typing::infer(env, &c.name, m, &mut s, false);
            overload_hazard(&s, &t, env, c, top)
        }),
    }
}

fn lifted(top: &BytecodeClass, c: &BytecodeClass, m: &MethodInfo) -> Option<Vec<IStmt>> {
    lift_method(top, c, m).ok()
}

fn bare_candidates<'e>(
    env: &'e Env,
    c: &BytecodeClass,
    top: &BytecodeClass,
    name: &str,
) -> Vec<&'e crate::compiler::env::MethodSig> {
    let own = env.methods_named(&c.name, name);
    if !own.is_empty() || c.name == top.name {
        return own;
    }
    env.methods_named(&top.name, name).into_iter().filter(|m| m.is_static).collect()
}

fn bare_reaches(env: &Env, c: &BytecodeClass, top: &BytecodeClass, r: &MethodRef) -> bool {
    bare_candidates(env, c, top, &r.name).iter().any(|m| m.owner == r.owner && m.params == r.params)
}

fn bool_literal_local(stmts: &[IStmt]) -> bool {
    let mut first: BTreeMap<u16, bool> = BTreeMap::new();
    visit_stmts(stmts, &mut |s| {
        if let IStmt::Store(slot, e) = s {
            first.entry(*slot).or_insert(matches!(e, IExpr::Int(0 | 1)));
        }
    });
    let literal: BTreeSet<u16> = first.into_iter().filter(|(_, v)| *v).map(|(k, _)| k).collect();
    let mut hard = false;
    let is_lit_local = |e: &IExpr| match e {
        IExpr::Local(s) => literal.contains(s),
        IExpr::Not(x) => matches!(&**x, IExpr::Local(s) if literal.contains(s)),
        _ => false,
    };
    visit_stmts(stmts, &mut |s| match s {
        IStmt::If { cond, .. } | IStmt::While { cond: Some(cond), .. } => hard |= is_lit_local(cond),
        IStmt::Store(slot, e) if literal.contains(slot) => {
            hard |= matches!(e, IExpr::Bin(op, _, _) if op.is_comparison()) || matches!(e, IExpr::Not(_))
        }
        _ => {}
    });
    hard
}

fn overload_hazard(stmts: &[IStmt], t: &Typing<'_>, env: &Env, c: &BytecodeClass, top: &BytecodeClass) -> bool {
    let mut hit = false;
    let differs = |cands: Vec<&Vec<Type>>, params: &[Type], args: &[IExpr]| {
        let types: Vec<Type> = args.iter().map(|a| t.type_of(a)).collect();
        matches!(env.resolve(&cands, |p| p.as_slice(), &types), Ok(p) if p.as_slice() != params)
    };
    let check = |e: &IExpr| {
        let mut hit = false;
        e.visit(&mut |x| match x {
            IExpr::StaticCall(m, args) => {
                let cands: Vec<Vec<Type>> =
                    bare_candidates(env, c, top, &m.name).iter().map(|s| s.params.clone()).collect();
                hit |= differs(cands.iter().collect(), &m.params, args);
            }
            IExpr::VirtCall(r, m, args) => {
                let owner = match t.type_of(r) {
                    Type::Class(n) => n,
                    _ => m.owner.clone(),
                };
                let cands: Vec<Vec<Type>> =
                    env.methods_named(&owner, &m.name).iter().map(|s| s.params.clone()).collect();
                hit |= differs(cands.iter().collect(), &m.params, args);
            }
            IExpr::New(m, args, w) => {
                let n = m.params.len() - usize::from(w.is_some());
                let cands: Vec<Vec<Type>> =
                    env.get(&m.owner).map(|i| i.ctors.iter().map(|k| k.params.clone()).collect()).unwrap_or_default();
                hit |= differs(cands.iter().collect(), &m.params[..n], &args[..n.min(args.len())]);
            }
            _ => {}
        });
        hit
    };
    visit_stmts(stmts, &mut |s| {
        for e in s.exprs() {
            hit |= check(e);
        }
        if let IStmt::SuperCall(m, args) = s {
            let cands: Vec<Vec<Type>> =
                env.get(&m.owner).map(|i| i.ctors.iter().map(|k| k.params.clone()).collect()).unwrap_or_default();
            let types: Vec<Type> = args.iter().map(|a| t.type_of(a)).collect();
            let refs: Vec<&Vec<Type>> = cands.iter().collect();
            hit |= matches!(env.resolve(&refs, |p| p.as_slice(), &types), Ok(p) if *p != m.params);
        }
    });
    hit
}
