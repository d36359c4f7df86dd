//! Bytecode class to source text, parameterized by a backend style.

use std::collections::BTreeSet;

use super::body::{const_lit, emit_body, ClassCx};
use super::ir::*;
use super::lift::lift_method;
use super::rewrite;
use crate::compiler::env::Env;
use crate::lang::*;
use crate::vm::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalNames {
    /// Prefix followed by the slot number.
    Slot(&'static str),
    /// Prefix followed by a running counter.
    Seq(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statics {
    /// Always `Owner.member`.
    Qualified,
    /// Bare only when that resolves to the same member.
    Minimal,
    /// Bare whenever the owner is the current class (fields) or always (calls).
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CastMode {
    Always,
    WhenNeeded,
    Never,
}

/// Knobs that make up a backend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Style {
    pub locals: LocalNames,
    pub full_names: bool,
    pub statics: Statics,
    pub explicit_this: bool,
    pub casts: CastMode,
    pub explicit_super: bool,
    pub keep_trailing_return: bool,
    pub raw_newlines: bool,
    pub fold_concat: bool,
    pub invert_ifeq: bool,
    pub else_if: bool,
    pub hoist_static_inits: bool,
    pub loop_rewrites: bool,
    pub literal_int: bool,
    pub only_marker_wrappers: bool,
    pub reject_handler_in_loop: bool,
    /// Replace a method that cannot be lifted by a throwing stub instead of
    /// giving up on the whole class.
    pub stub_failed_bodies: bool,
}

impl Style {
    pub fn literalist() -> Style {
        Style {
            locals: LocalNames::Slot("r"),
            full_names: true,
            statics: Statics::Qualified,
            explicit_this: true,
            casts: CastMode::Always,
            explicit_super: true,
            keep_trailing_return: true,
            raw_newlines: true,
            fold_concat: false,
            invert_ifeq: false,
            else_if: false,
            hoist_static_inits: false,
            loop_rewrites: false,
            literal_int: false,
            only_marker_wrappers: false,
            reject_handler_in_loop: true,
            stub_failed_bodies: false,
        }
    }

    pub fn sugarer() -> Style {
        Style {
            locals: LocalNames::Slot("var"),
            full_names: false,
            statics: Statics::Minimal,
            explicit_this: false,
            casts: CastMode::WhenNeeded,
            explicit_super: false,
            keep_trailing_return: false,
            raw_newlines: false,
            fold_concat: true,
            invert_ifeq: true,
            else_if: true,
            hoist_static_inits: true,
            loop_rewrites: true,
            literal_int: true,
            only_marker_wrappers: true,
            reject_handler_in_loop: false,
            stub_failed_bodies: false,
        }
    }

    pub fn optimist() -> Style {
        Style {
            locals: LocalNames::Seq("v"),
            full_names: false,
            statics: Statics::Bare,
            explicit_this: false,
            casts: CastMode::Never,
            explicit_super: false,
            keep_trailing_return: false,
            raw_newlines: false,
            fold_concat: true,
            invert_ifeq: false,
            else_if: true,
            hoist_static_inits: true,
            loop_rewrites: false,
            literal_int: false,
            only_marker_wrappers: false,
            reject_handler_in_loop: false,
            stub_failed_bodies: false,
        }
    }
}

fn modifiers(f: &Flags) -> Modifiers {
    Modifiers { public: f.public, private: f.private, is_static: f.is_static, is_final: f.is_final }
}

fn handler_in_loop(stmts: &[IStmt], in_loop: bool) -> bool {
    stmts.iter().any(|s| match s {
        IStmt::Try { .. } if in_loop => true,
        IStmt::While { body, .. } => handler_in_loop(body, true),
        other => other.blocks().into_iter().any(|b| handler_in_loop(b, in_loop)),
    })
}

/// Renders `bc` (a top-level class with its nested classes) as source.
pub fn emit_class(bc: &BytecodeClass, style: &Style) -> Result<String, String> {
    let env = Env::from_bytecode(bc);
    let synthetic: BTreeSet<String> =
        bc.all_classes().into_iter().filter(|c| c.flags.synthetic).map(|c| c.name.clone()).collect();
    let mut ast = class_ast(bc, bc, style, &env, &synthetic)?;
    for inner in bc.inners.iter().filter(|c| !c.flags.synthetic) {
        let mut n = class_ast(bc, inner, style, &env, &synthetic)?;
        n.name = inner.name.strip_prefix(&format!("{}.", bc.name)).unwrap_or(&inner.name).to_string();
        ast.members.push(TypeMember::new(MemberBody::Nested(Box::new(n)), Span::default()));
    }
    Ok(pretty_print_with(&ast, PrintOptions { raw_newlines: style.raw_newlines }))
}

fn stub() -> Block {
    let e = Expr::synth(ExprKind::New { class: "RuntimeException".into(), args: Vec::new() });
    Block::synth(vec![Stmt::synth(StmtKind::Throw(e))])
}

/// Lifts a method and applies the style's statement-level clean-ups.
fn prepare(top: &BytecodeClass, cls: &BytecodeClass, m: &MethodInfo, style: &Style) -> Result<Vec<IStmt>, String> {
    let mut stmts = lift_method(top, cls, m).map_err(|e| format!("{}: {e}", m.key()))?;
    if style.reject_handler_in_loop && handler_in_loop(&stmts, false) {
        return Err(format!("{}: exception handler inside a loop", m.key()));
    }
    if m.is_ctor() {
        if let Some(IStmt::SuperCall(_, args)) = stmts.first() {
            if args.is_empty() && (!style.explicit_super || m.flags.synthetic) {
                stmts.remove(0);
            }
        }
    }
    if m.ret == Type::Void
        && (!style.keep_trailing_return || m.is_clinit() || m.flags.synthetic)
        && stmts.last() == Some(&IStmt::Return(None))
    {
        stmts.pop();
    }
    if style.loop_rewrites {
        rewrite::sink_tail_return(&mut stmts);
        rewrite::drop_tail_continues(&mut stmts);
    }
    Ok(stmts)
}

fn class_ast(
    top: &BytecodeClass,
    cls: &BytecodeClass,
    style: &Style,
    env: &Env,
    synthetic: &BTreeSet<String>,
) -> Result<ClassAst, String> {
    let outer = (cls.name != top.name).then_some(top.name.as_str());
    let cx = ClassCx { style, env, top: &top.name, class: &cls.name, outer, synthetic };
    let simple = cls.name.rsplit('.').next().unwrap_or(&cls.name).to_string();
    let mut fields: Vec<FieldDecl> = cls
        .fields
        .iter()
        .map(|f| FieldDecl {
            modifiers: modifiers(&f.flags),
            ty: cx.ty(&f.ty),
            name: f.name.clone(),
            init: f.constant.as_ref().map(const_lit),
        })
        .collect();
    let field_index =
        |f: &FieldRef| (f.owner == cls.name).then(|| cls.fields.iter().position(|x| x.name == f.name)).flatten();
    let mut members = Vec::new();
    let mut static_block = None;
    for m in &cls.methods {
        if m.flags.synthetic && !(m.is_ctor() && m.params.is_empty()) {
            continue;
        }
        let stmts = match prepare(top, cls, m, style) {
            Ok(s) => Some(s),
            Err(_) if style.stub_failed_bodies && !m.is_clinit() => None,
            Err(e) => return Err(e),
        };
        let emitted = match &stmts {
            Some(s) => Some(emit_body(&cx, m, s.clone())?),
            None => None,
        };
        let (params, body) = match emitted {
            Some(pb) => pb,
            None => {
                let params = m
                    .params
                    .iter()
                    .enumerate()
                    .map(|(i, p)| Param {
                        ty: cx.ty(p),
                        name: m.param_names.get(i).cloned().unwrap_or_else(|| format!("p{i}")),
                        span: Span::default(),
                    })
                    .collect();
                (params, stub())
            }
        };
        let stmts = stmts.unwrap_or_default();
        if m.is_clinit() {
            let mut body = body;
            if style.hoist_static_inits {
                let mut last = None;
                let mut k = 0;
                for s in &stmts {
                    let IStmt::PutStatic(f, v) = s else { break };
                    let Some(idx) = field_index(f) else { break };
                    let mut local = false;
                    v.visit(&mut |x| local |= matches!(x, IExpr::Local(_)));
                    if local || cls.fields[idx].constant.is_some() || last.is_some_and(|l| idx <= l) {
                        break;
                    }
                    last = Some(idx);
                    k += 1;
                }
                for (s, e) in stmts.iter().zip(body.stmts.drain(..k).collect::<Vec<_>>()) {
                    let (IStmt::PutStatic(f, _), StmtKind::Assign { value, .. }) = (s, e.kind) else { unreachable!() };
                    fields[field_index(f).unwrap()].init = Some(value);
                }
            }
            if !body.stmts.is_empty() {
                static_block = Some(StaticBlock { ordinal: 0, body });
            }
            continue;
        }
        if m.is_ctor() && m.flags.synthetic {
            // Default constructor: recover field initializers when the body
            // is nothing but assignments to own fields in declaration order.
            let mut last = None;
            let only_inits = stmts.iter().all(|s| match s {
                IStmt::PutField(IExpr::This, f, _) => match field_index(f) {
                    Some(i) if last.is_none_or(|l| i > l) => {
                        last = Some(i);
                        true
                    }
                    _ => false,
                },
                _ => false,
            });
            if only_inits {
                for (s, e) in stmts.iter().zip(body.stmts) {
                    let (IStmt::PutField(_, f, _), StmtKind::Assign { value, .. }) = (s, e.kind) else {
                        unreachable!()
                    };
                    fields[field_index(f).unwrap()].init = Some(value);
                }
                continue;
            }
        }
        let mods = modifiers(&m.flags);
        let body_member = if m.is_ctor() {
            let mods =
                if m.flags.synthetic { Modifiers { public: m.flags.public, ..Modifiers::default() } } else { mods };
            MemberBody::Constructor(CtorDecl { modifiers: mods, name: simple.clone(), params, body })
        } else {
            MemberBody::Method(MethodDecl { modifiers: mods, ret: cx.ty(&m.ret), name: m.name.clone(), params, body })
        };
        members.push(TypeMember::new(body_member, Span::default()));
    }
    let mut all: Vec<TypeMember> =
        fields.into_iter().map(|f| TypeMember::new(MemberBody::Field(f), Span::default())).collect();
    all.extend(members);
    if let Some(sb) = static_block {
        all.push(TypeMember::new(MemberBody::StaticBlock(sb), Span::default()));
    }
    let sup = (cls.superclass != "Object" && !cls.superclass.is_empty())
        .then(|| (cx.class_name(&cls.superclass), Span::default()));
    Ok(ClassAst {
        name: cls.name.clone(),
        header: ClassHeader { modifiers: modifiers(&cls.flags), superclass: sup, span: Span::default() },
        members: all,
        span: Span::default(),
        body_span: Span::default(),
        source_len: 0,
    })
}
