//! MiniJ to bytecode compiler with two code-shape variants.

mod codegen;
pub mod env;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lang::*;
use crate::vm::verify::max_stack;
use crate::vm::*;
use codegen::{Gen, WrapperKey};
use env::{ClassInfo, Env};

/// Compiler variant. The two differ only in code shape: string
/// concatenation, if-else polarity and private nested constructor access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Variant {
    A,
    B,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::A, Variant::B];
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::B => "B",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            _ => Err(format!("unknown compiler variant `{s}`")),
        }
    }
}

/// Name of the empty marker class used by variant A constructor wrappers.
pub fn synthetic_class_name(top: &str) -> String {
    format!("{top}$1")
}

fn flags_of(m: &Modifiers) -> Flags {
    Flags { public: m.public, private: m.private, is_static: m.is_static, is_final: m.is_final, synthetic: false }
}

/// Parses and compiles source text.
pub fn compile_source(src: &str, variant: Variant) -> Result<BytecodeClass, Vec<Diagnostic>> {
    let ast = parse(src)?;
    compile(&ast, variant)
}

/// Syntactic-correctness oracle: parse and compile both succeed.
pub fn recompile_check(src: &str, variant: Variant) -> Result<(), Vec<Diagnostic>> {
    compile_source(src, variant).map(|_| ())
}

/// Compiles a class. All diagnostics found are returned on failure; an
/// error inside one member does not stop the others from being checked.
pub fn compile(ast: &ClassAst, variant: Variant) -> Result<BytecodeClass, Vec<Diagnostic>> {
    let (env, mut diags) = Env::with_class(ast);
    let mut wrappers = BTreeSet::new();
    let mut top = compile_class(&env, variant, ast, ast, &ast.name, &mut wrappers, &mut diags);
    for m in &ast.members {
        if let MemberBody::Nested(n) = &m.body {
            let name = format!("{}.{}", ast.name, n.name);
            let bc = compile_class(&env, variant, ast, n, &name, &mut wrappers, &mut diags);
            top.inners.push(bc);
        }
    }
    if !wrappers.is_empty() {
        add_wrappers(&mut top, &wrappers, variant);
    }
    let mut seen = BTreeSet::new();
    diags.retain(|d| seen.insert((d.span.start, d.span.end, d.message.clone())));
    if has_errors(&diags) {
        diags.sort_by_key(|d| (d.span.start, d.span.end));
        return Err(diags);
    }
    Ok(canonicalize_pool(&top))
}

fn compile_class(
    env: &Env,
    variant: Variant,
    top: &ClassAst,
    c: &ClassAst,
    name: &str,
    wrappers: &mut BTreeSet<WrapperKey>,
    diags: &mut Vec<Diagnostic>,
) -> BytecodeClass {
    let info = env.get(name).expect("class registered").clone();
    let mut bc = BytecodeClass::new(name, info.sup.clone().unwrap_or_else(|| "Object".into()));
    bc.flags = flags_of(&c.header.modifiers);
    let mut instance_inits = Vec::new();
    let mut static_parts: Vec<&TypeMember> = Vec::new();
    for m in &c.members {
        match &m.body {
            MemberBody::Field(f) => {
                let sig = info.fields.iter().find(|x| x.name == f.name).expect("field registered").clone();
                bc.fields.push(FieldInfo {
                    name: f.name.clone(),
                    ty: sig.ty.clone(),
                    flags: flags_of(&f.modifiers),
                    constant: sig.constant.clone(),
                });
                if f.init.is_some() {
                    if f.modifiers.is_static {
                        if sig.constant.is_none() {
                            static_parts.push(m);
                        }
                    } else {
                        instance_inits.push((sig, f.init.clone().unwrap()));
                    }
                }
            }
            MemberBody::StaticBlock(_) => static_parts.push(m),
            _ => {}
        }
    }

    let has_ctor = c.members.iter().any(|m| matches!(m.body, MemberBody::Constructor(_)));
    if !has_ctor {
        let mut g = Gen::new(env, variant, top, &info, &mut bc, wrappers, false, Type::Void);
        let r = (|| {
            g.super_call(&[], c.header.span)?;
            for (f, init) in &instance_inits {
                g.instance_init(f, init)?;
            }
            g.finish(true, c.header.span)
        })();
        match r {
            Ok(()) => {
                let flags = Flags { public: c.header.modifiers.public, synthetic: true, ..Flags::default() };
                let m = finish_method(g, name, "<init>", vec![], vec![], Type::Void, flags);
                bc.methods.push(m);
            }
            Err(d) => diags.push(d),
        }
    }

    for m in &c.members {
        let r = match &m.body {
            MemberBody::Method(md) => compile_method(env, variant, top, &info, &mut bc, wrappers, md),
            MemberBody::Constructor(cd) => {
                compile_ctor(env, variant, top, &info, &mut bc, wrappers, cd, &instance_inits)
            }
            _ => continue,
        };
        match r {
            Ok(mi) => bc.methods.push(mi),
            Err(d) => diags.push(d),
        }
    }

    if !static_parts.is_empty() {
        let mut g = Gen::new(env, variant, top, &info, &mut bc, wrappers, true, Type::Void);
        let mut ok = true;
        for m in &static_parts {
            let r = match &m.body {
                MemberBody::Field(f) => {
                    let sig = info.fields.iter().find(|x| x.name == f.name).unwrap().clone();
                    g.static_init(&sig, f.init.as_ref().unwrap())
                }
                MemberBody::StaticBlock(sb) => g.block(&sb.body).and_then(|live| {
                    if live {
                        Ok(())
                    } else {
                        Err(Diagnostic::error("initializer must be able to complete normally", sb.body.span))
                    }
                }),
                _ => unreachable!(),
            };
            if let Err(d) = r {
                diags.push(d);
                ok = false;
            }
        }
        if ok && g.finish(true, c.header.span).is_ok() {
            let flags = Flags { is_static: true, ..Flags::default() };
            let mi = finish_method(g, name, "<clinit>", vec![], vec![], Type::Void, flags);
            bc.methods.push(mi);
        }
    }
    bc
}

fn finish_method(
    g: Gen<'_>,
    owner: &str,
    mname: &str,
    params: Vec<Type>,
    param_names: Vec<String>,
    ret: Type,
    flags: Flags,
) -> MethodInfo {
    let max_locals = g.max_locals();
    let stack = max_stack(&g.code, &g.handlers, g.bc);
    MethodInfo {
        owner: owner.to_string(),
        name: mname.to_string(),
        params,
        param_names,
        ret,
        flags,
        max_stack: stack as u16,
        max_locals,
        code: g.code,
        handlers: g.handlers,
    }
}

fn declare_params(g: &mut Gen<'_>, params: &[Param]) -> Result<Vec<Type>, Diagnostic> {
    let mut tys = Vec::new();
    for p in params {
        let t = g.qualify(&p.ty).map_err(|d| Diagnostic::error(d.message, p.span))?;
        if t == Type::Void {
            return Err(Diagnostic::error("illegal start of parameter: void", p.span));
        }
        g.declare(&p.name, t.clone(), p.span)?;
        tys.push(t);
    }
    Ok(tys)
}

fn block_end(b: &Block) -> Span {
    Span::new(b.span.end.saturating_sub(1), b.span.end)
}

fn compile_method(
    env: &Env,
    variant: Variant,
    top: &ClassAst,
    info: &ClassInfo,
    bc: &mut BytecodeClass,
    wrappers: &mut BTreeSet<WrapperKey>,
    md: &MethodDecl,
) -> Result<MethodInfo, Diagnostic> {
    let ret = g_ret(env, top, &md.ret);
    let mut g = Gen::new(env, variant, top, info, bc, wrappers, md.modifiers.is_static, ret.clone());
    let params = declare_params(&mut g, &md.params)?;
    let live = g.stmts(&md.body.stmts)?;
    g.finish(live, block_end(&md.body))?;
    let names = md.params.iter().map(|p| p.name.clone()).collect();
    Ok(finish_method(g, &info.name, &md.name, params, names, ret, flags_of(&md.modifiers)))
}

fn g_ret(_env: &Env, top: &ClassAst, t: &Type) -> Type {
    env::qualify_type_in(top, t)
}

#[allow(clippy::too_many_arguments)]
fn compile_ctor(
    env: &Env,
    variant: Variant,
    top: &ClassAst,
    info: &ClassInfo,
    bc: &mut BytecodeClass,
    wrappers: &mut BTreeSet<WrapperKey>,
    cd: &CtorDecl,
    inits: &[(env::FieldSig, Expr)],
) -> Result<MethodInfo, Diagnostic> {
    let mut g = Gen::new(env, variant, top, info, bc, wrappers, false, Type::Void);
    let params = declare_params(&mut g, &cd.params)?;
    let (sup_args, rest, span) = match cd.body.stmts.first() {
        Some(Stmt { kind: StmtKind::SuperCall(args), span }) => (args.as_slice(), &cd.body.stmts[1..], *span),
        _ => (&[][..], &cd.body.stmts[..], cd.body.span),
    };
    g.super_call(sup_args, span)?;
    for (f, init) in inits {
        g.instance_init(f, init)?;
    }
    let live = g.stmts(rest)?;
    g.finish(live, block_end(&cd.body))?;
    let names = cd.params.iter().map(|p| p.name.clone()).collect();
    Ok(finish_method(g, &info.name, "<init>", params, names, Type::Void, flags_of(&cd.modifiers)))
}

/// Appends synthetic constructor wrappers to nested classes and, under
/// variant A, the empty marker class.
fn add_wrappers(top: &mut BytecodeClass, wrappers: &BTreeSet<WrapperKey>, variant: Variant) {
    let marker = synthetic_class_name(&top.name);
    for (class, params) in wrappers {
        let Some(bc) = top.inners.iter_mut().find(|c| &c.name == class) else { continue };
        let extra = match variant {
            Variant::A => Type::Class(marker.clone()),
            Variant::B => Type::Class(class.clone()),
        };
        let mut code = vec![Insn::Aload(0)];
        let mut slot = 1u16;
        for p in params {
            code.push(if matches!(p, Type::Int | Type::Bool) { Insn::Iload(slot) } else { Insn::Aload(slot) });
            slot += 1;
        }
        let k = bc.intern(Const::Method(MethodRef {
            owner: class.clone(),
            name: "<init>".into(),
            params: params.clone(),
            ret: Type::Void,
        }));
        code.push(Insn::InvokeSpecial(k));
        code.push(Insn::Return);
        let mut all = params.clone();
        all.push(extra);
        let original = bc.method("<init>", params).cloned();
        let mut names: Vec<String> = match &original {
            Some(o) => o.param_names.clone(),
            None => (0..params.len()).map(|i| format!("p{i}")).collect(),
        };
        names.push("unused".into());
        let handlers = Vec::new();
        let stack = max_stack(&code, &handlers, bc);
        bc.methods.push(MethodInfo {
            owner: class.clone(),
            name: "<init>".into(),
            params: all,
            param_names: names,
            ret: Type::Void,
            flags: Flags { public: true, synthetic: true, ..Flags::default() },
            max_stack: stack as u16,
            max_locals: slot + 1,
            code,
            handlers,
        });
    }
    if variant == Variant::A {
        let mut m = BytecodeClass::new(marker, "Object");
        m.flags = Flags { synthetic: true, ..Flags::default() };
        top.inners.push(m);
    }
}

#[cfg(test)]
mod tests;
