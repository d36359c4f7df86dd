//! Class environment: member tables, subtyping and overload resolution.

use std::collections::HashMap;

use crate::lang::signature::qualify_class_name;
use crate::lang::*;
use crate::vm::prelude::prelude;
use crate::vm::ConstValue;

/// Type of the `null` literal.
pub const NULL_TYPE: &str = "<null>";
pub const BUILDER: &str = "StringBuilder";

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSig {
    pub name: String,
    pub ty: Type,
    pub is_static: bool,
    pub is_final: bool,
    pub constant: Option<ConstValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSig {
    pub owner: String,
    pub name: String,
    pub params: Vec<Type>,
    pub ret: Type,
    pub is_static: bool,
    pub private: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtorSig {
    pub owner: String,
    pub params: Vec<Type>,
    pub private: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassInfo {
    pub name: String,
    pub sup: Option<String>,
    pub library: bool,
    /// Enclosing top-level class, for nested classes.
    pub outer: Option<String>,
    pub fields: Vec<FieldSig>,
    pub methods: Vec<MethodSig>,
    pub ctors: Vec<CtorSig>,
}

#[derive(Debug, Clone, Default)]
pub struct Env {
    pub classes: HashMap<String, ClassInfo>,
}

/// Compile-time constant value of a field initializer, if it is a literal.
pub fn literal_constant(ty: &Type, init: &Expr) -> Option<ConstValue> {
    match (ty, &init.kind) {
        (Type::Int, ExprKind::Int(n)) if *n <= i32::MAX as i64 => Some(ConstValue::Int(*n as i32)),
        (Type::Int, ExprKind::Unary { op: UnOp::Neg, operand }) => match operand.kind {
            ExprKind::Int(n) if n <= 1 << 31 => Some(ConstValue::Int((-n) as i32)),
            _ => None,
        },
        (Type::Bool, ExprKind::Bool(b)) => Some(ConstValue::Bool(*b)),
        (Type::Str, ExprKind::Str(s)) => Some(ConstValue::Str(s.clone())),
        _ => None,
    }
}

impl Env {
    /// Library classes only.
    pub fn library() -> Env {
        let mut env = Env::default();
        for c in prelude() {
            let info = ClassInfo {
                name: c.name.clone(),
                sup: if c.superclass.is_empty() { None } else { Some(c.superclass.clone()) },
                library: true,
                outer: None,
                fields: c
                    .fields
                    .iter()
                    .filter(|f| !f.flags.private)
                    .map(|f| FieldSig {
                        name: f.name.clone(),
                        ty: f.ty.clone(),
                        is_static: f.flags.is_static,
                        is_final: f.flags.is_final,
                        constant: f.constant.clone(),
                    })
                    .collect(),
                methods: c
                    .methods
                    .iter()
                    .filter(|m| !m.is_ctor() && !m.is_clinit())
                    .map(|m| MethodSig {
                        owner: c.name.clone(),
                        name: m.name.clone(),
                        params: m.params.clone(),
                        ret: m.ret.clone(),
                        is_static: m.flags.is_static,
                        private: m.flags.private,
                    })
                    .collect(),
                ctors: c
                    .methods
                    .iter()
                    .filter(|m| m.is_ctor())
                    .map(|m| CtorSig { owner: c.name.clone(), params: m.params.clone(), private: m.flags.private })
                    .collect(),
            };
            env.classes.insert(c.name.clone(), info);
        }
        env
    }

    /// Library plus the given class and its nested classes. Signature
    /// problems (unknown types, duplicates) are returned as diagnostics.
    pub fn with_class(ast: &ClassAst) -> (Env, Vec<Diagnostic>) {
        let mut env = Env::library();
        let mut diags = Vec::new();
        let mut pending = vec![(ast, None::<String>)];
        for m in &ast.members {
            if let MemberBody::Nested(n) = &m.body {
                pending.push((n, Some(ast.name.clone())));
            }
        }
        // Register names first so that member types can refer to any class.
        for (c, outer) in &pending {
            let name = match outer {
                Some(o) => format!("{o}.{}", c.name),
                None => c.name.clone(),
            };
            if env.classes.contains_key(&name) {
                diags.push(Diagnostic::error(format!("duplicate class {name}"), c.header.span));
                continue;
            }
            env.classes.insert(
                name.clone(),
                ClassInfo {
                    name,
                    sup: None,
                    library: false,
                    outer: outer.clone(),
                    fields: Vec::new(),
                    methods: Vec::new(),
                    ctors: Vec::new(),
                },
            );
        }
        for (c, outer) in &pending {
            let name = match outer {
                Some(o) => format!("{o}.{}", c.name),
                None => c.name.clone(),
            };
            let sup = match &c.header.superclass {
                None => "Object".to_string(),
                Some((s, span)) => {
                    let q = qualify_class_name(ast, s);
                    if !env.classes.contains_key(&q) || q == name {
                        diags.push(Diagnostic::error(format!("cannot find symbol: class {s}"), *span));
                        "Object".to_string()
                    } else {
                        q
                    }
                }
            };
            let mut info = env.classes[&name].clone();
            info.sup = Some(sup);
            for m in &c.members {
                let resolve = |t: &Type, diags: &mut Vec<Diagnostic>| -> Type {
                    let q = qualify_type_in(ast, t);
                    if let Type::Class(n) = &q {
                        if !env.classes.contains_key(n) && n != BUILDER {
                            diags.push(Diagnostic::error(format!("cannot find symbol: class {n}"), m.span));
                        }
                    }
                    q
                };
                match &m.body {
                    MemberBody::Field(f) => {
                        let ty = resolve(&f.ty, &mut diags);
                        if info.fields.iter().any(|x| x.name == f.name) {
                            diags.push(Diagnostic::error(
                                format!("variable {} is already defined in class {name}", f.name),
                                m.span,
                            ));
                        }
                        let constant = if f.modifiers.is_static && f.modifiers.is_final {
                            f.init.as_ref().and_then(|e| literal_constant(&ty, e))
                        } else {
                            None
                        };
                        info.fields.push(FieldSig {
                            name: f.name.clone(),
                            ty,
                            is_static: f.modifiers.is_static,
                            is_final: f.modifiers.is_final,
                            constant,
                        });
                    }
                    MemberBody::Method(md) => {
                        let params: Vec<Type> = md.params.iter().map(|p| resolve(&p.ty, &mut diags)).collect();
                        let ret = resolve(&md.ret, &mut diags);
                        if info.methods.iter().any(|x| x.name == md.name && x.params == params) {
                            diags.push(Diagnostic::error(
                                format!(
                                    "method {}({}) is already defined in class {name}",
                                    md.name,
                                    crate::vm::join_types(&params)
                                ),
                                m.span,
                            ));
                        }
                        info.methods.push(MethodSig {
                            owner: name.clone(),
                            name: md.name.clone(),
                            params,
                            ret,
                            is_static: md.modifiers.is_static,
                            private: md.modifiers.private,
                        });
                    }
                    MemberBody::Constructor(cd) => {
                        let params: Vec<Type> = cd.params.iter().map(|p| resolve(&p.ty, &mut diags)).collect();
                        if cd.name != c.simple_name() {
                            diags.push(Diagnostic::error("invalid method declaration; return type required", m.span));
                        }
                        if info.ctors.iter().any(|x| x.params == params) {
                            diags.push(Diagnostic::error(
                                format!(
                                    "constructor {}({}) is already defined",
                                    c.simple_name(),
                                    crate::vm::join_types(&params)
                                ),
                                m.span,
                            ));
                        }
                        info.ctors.push(CtorSig { owner: name.clone(), params, private: cd.modifiers.private });
                    }
                    MemberBody::Nested(_) | MemberBody::StaticBlock(_) => {}
                }
            }
            if info.ctors.is_empty() {
                info.ctors.push(CtorSig { owner: name.clone(), params: Vec::new(), private: false });
            }
            env.classes.insert(name, info);
        }
        // Reject inheritance cycles.
        let names: Vec<String> = env.classes.keys().cloned().collect();
        for n in names {
            let mut cur = Some(n.clone());
            let mut steps = 0;
            while let Some(c) = cur {
                steps += 1;
                if steps > env.classes.len() + 1 {
                    diags.push(Diagnostic::error(format!("cyclic inheritance involving {n}"), ast.header.span));
                    env.classes.get_mut(&n).unwrap().sup = Some("Object".into());
                    break;
                }
                cur = env.classes.get(&c).and_then(|i| i.sup.clone());
            }
        }
        (env, diags)
    }

    /// Library plus the source-visible view of a compiled class and its
    /// nested classes (synthetic members and classes are left out).
    pub fn from_bytecode(bc: &crate::vm::BytecodeClass) -> Env {
        let mut env = Env::library();
        for (i, c) in bc.all_classes().into_iter().enumerate() {
            if c.flags.synthetic {
                continue;
            }
            let visible = || c.methods.iter().filter(|m| !m.flags.synthetic);
            let info = ClassInfo {
                name: c.name.clone(),
                sup: Some(if c.superclass.is_empty() { "Object".into() } else { c.superclass.clone() }),
                library: false,
                outer: if i == 0 { None } else { Some(bc.name.clone()) },
                fields: c
                    .fields
                    .iter()
                    .map(|f| FieldSig {
                        name: f.name.clone(),
                        ty: f.ty.clone(),
                        is_static: f.flags.is_static,
                        is_final: f.flags.is_final,
                        constant: f.constant.clone(),
                    })
                    .collect(),
                methods: visible()
                    .filter(|m| !m.is_ctor() && !m.is_clinit())
                    .map(|m| MethodSig {
                        owner: c.name.clone(),
                        name: m.name.clone(),
                        params: m.params.clone(),
                        ret: m.ret.clone(),
                        is_static: m.flags.is_static,
                        private: m.flags.private,
                    })
                    .collect(),
                ctors: c
                    .methods
                    .iter()
                    .filter(|m| m.is_ctor())
                    .filter(|m| !m.flags.synthetic || m.params.is_empty())
                    .map(|m| CtorSig { owner: c.name.clone(), params: m.params.clone(), private: m.flags.private })
                    .collect(),
            };
            env.classes.insert(c.name.clone(), info);
        }
        env
    }

    pub fn get(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub.to_string());
        let mut steps = 0;
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            steps += 1;
            if steps > self.classes.len() + 1 {
                return false;
            }
            cur = self.classes.get(&c).and_then(|i| i.sup.clone());
        }
        false
    }

    /// Assignment compatibility `from` → `to`.
    pub fn assignable(&self, from: &Type, to: &Type) -> bool {
        if from == to {
            return true;
        }
        match (from, to) {
            (Type::Class(f), t) if f == NULL_TYPE => t.is_reference(),
            (Type::Str, Type::Class(t)) => t == "Object",
            (Type::Class(f), Type::Class(t)) => t == "Object" || self.is_subclass(f, t),
            _ => false,
        }
    }

    /// Finds a field by name in `class` or its superclasses.
    pub fn field(&self, class: &str, name: &str) -> Option<(&ClassInfo, &FieldSig)> {
        let mut cur = Some(class.to_string());
        let mut steps = 0;
        while let Some(c) = cur {
            let info = self.classes.get(&c)?;
            if let Some(f) = info.fields.iter().find(|f| f.name == name) {
                return Some((info, f));
            }
            steps += 1;
            if steps > self.classes.len() {
                return None;
            }
            cur = info.sup.clone();
        }
        None
    }

    /// All methods named `name` visible in `class` (own declarations hide
    /// inherited ones with the same parameter types).
    pub fn methods_named(&self, class: &str, name: &str) -> Vec<&MethodSig> {
        let mut out: Vec<&MethodSig> = Vec::new();
        let mut cur = Some(class.to_string());
        let mut steps = 0;
        while let Some(c) = cur {
            let Some(info) = self.classes.get(&c) else { break };
            for m in info.methods.iter().filter(|m| m.name == name) {
                if !out.iter().any(|o| o.params == m.params) {
                    out.push(m);
                }
            }
            steps += 1;
            if steps > self.classes.len() {
                break;
            }
            cur = info.sup.clone();
        }
        out
    }

    fn applicable(&self, params: &[Type], args: &[Type]) -> bool {
        params.len() == args.len() && args.iter().zip(params).all(|(a, p)| self.assignable(a, p))
    }

    /// Most specific applicable candidate. `Err(true)` means ambiguity,
    /// `Err(false)` means nothing applies.
    pub fn resolve<'a, T>(
        &self,
        candidates: &[&'a T],
        params_of: impl Fn(&T) -> &[Type],
        args: &[Type],
    ) -> Result<&'a T, bool> {
        let app: Vec<&'a T> = candidates.iter().copied().filter(|c| self.applicable(params_of(c), args)).collect();
        if app.is_empty() {
            return Err(false);
        }
        let more_specific = |a: &T, b: &T| params_of(a).iter().zip(params_of(b)).all(|(x, y)| self.assignable(x, y));
        let best: Vec<&'a T> = app.iter().copied().filter(|&a| app.iter().all(|&b| more_specific(a, b))).collect();
        match best.len() {
            1 => Ok(best[0]),
            0 => Err(true),
            _ => Ok(best[0]),
        }
    }
}

/// Qualifies a written type relative to top-level class `ast`.
pub fn qualify_type_in(ast: &ClassAst, t: &Type) -> Type {
    crate::lang::signature::qualify_type(ast, t)
}
