use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;

/// Canonical identity of a type member within its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MemberSignature(pub String);

impl fmt::Display for MemberSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl MemberSignature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Resolves a class type written in the source of `class` to its fully
/// qualified spelling. Simple names of the class itself and of its nested
/// classes are expanded; everything else is taken as written.
pub fn qualify_type(class: &ClassAst, ty: &Type) -> Type {
    match ty {
        Type::Class(n) => Type::Class(qualify_class_name(class, n)),
        other => other.clone(),
    }
}

pub fn qualify_class_name(class: &ClassAst, name: &str) -> String {
    if name == class.simple_name() {
        return class.name.clone();
    }
    for m in &class.members {
        if let MemberBody::Nested(n) = &m.body {
            if n.name == name {
                return format!("{}.{}", class.name, n.name);
            }
        }
    }
    name.to_string()
}

fn param_list(class: &ClassAst, params: &[Param]) -> String {
    params.iter().map(|p| qualify_type(class, &p.ty).to_string()).collect::<Vec<_>>().join(",")
}

/// Signature of member `m` declared directly in `class`.
pub fn member_signature(m: &TypeMember, class: &ClassAst) -> MemberSignature {
    signature_in(&m.body, class, &class.name)
}

/// Signature of `body` declared in a class whose qualified name is `owner`.
/// `context` is used to qualify parameter types.
pub fn signature_in(body: &MemberBody, context: &ClassAst, owner: &str) -> MemberSignature {
    MemberSignature(match body {
        MemberBody::Field(f) => format!("{owner}#{}", f.name),
        MemberBody::Constructor(c) => format!("{owner}({})", param_list(context, &c.params)),
        MemberBody::Method(md) => format!("{owner}.{}({})", md.name, param_list(context, &md.params)),
        MemberBody::Nested(n) => format!("{owner}.{}", n.name),
        MemberBody::StaticBlock(sb) => format!("{owner}.<clinit#{}>", sb.ordinal),
    })
}

pub fn signatures(class: &ClassAst) -> Vec<MemberSignature> {
    class.members.iter().map(|m| member_signature(m, class)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    #[test]
    fn scheme() {
        let ast = parse(
            "class a.b.Yaml { static final str BLANK_CONFIG = \"{}\"; Yaml() { super(); } \
             void set(int k, str v) { } static { } static { } class In { } void take(In x) { } }",
        )
        .unwrap();
        let sigs: Vec<String> = signatures(&ast).into_iter().map(|s| s.0).collect();
        assert_eq!(
            sigs,
            vec![
                "a.b.Yaml#BLANK_CONFIG",
                "a.b.Yaml()",
                "a.b.Yaml.set(int,str)",
                "a.b.Yaml.<clinit#0>",
                "a.b.Yaml.<clinit#1>",
                "a.b.Yaml.In",
                "a.b.Yaml.take(a.b.Yaml.In)",
            ]
        );
    }
}
