//! Labeled ordered trees and the conversion from class ASTs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::*;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    pub label: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: impl Into<String>) -> Tree {
        Tree { label: label.into(), children: Vec::new() }
    }

    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree { label: label.into(), children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// Nodes in post-order.
    pub fn postorder(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        fn go<'t>(t: &'t Tree, out: &mut Vec<&'t Tree>) {
            for c in &t.children {
                go(c, out);
            }
            out.push(t);
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Display for Tree {
    /// `label(child, child)` notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn mods(m: &Modifiers) -> String {
    let mut s = String::new();
    for (on, w) in [(m.public, "public "), (m.private, "private "), (m.is_static, "static "), (m.is_final, "final ")] {
        if on {
            s.push_str(w);
        }
    }
    s
}

pub fn class_tree(c: &ClassAst) -> Tree {
    let mut label = format!("class {}{}", mods(&c.header.modifiers), c.name);
    if let Some((s, _)) = &c.header.superclass {
        label.push_str(&format!(" extends {s}"));
    }
    Tree::node(label, c.members.iter().map(member_tree).collect())
}

fn params(ps: &[Param]) -> Vec<Tree> {
    ps.iter().map(|p| Tree::leaf(format!("param {} {}", p.ty, p.name))).collect()
}

fn member_tree(m: &TypeMember) -> Tree {
    match &m.body {
        MemberBody::Field(f) => Tree::node(
            format!("field {}{} {}", mods(&f.modifiers), f.ty, f.name),
            f.init.iter().map(expr_tree).collect(),
        ),
        MemberBody::Method(md) => {
            let mut ch = params(&md.params);
            ch.push(block_tree(&md.body));
            Tree::node(format!("method {}{} {}", mods(&md.modifiers), md.ret, md.name), ch)
        }
        MemberBody::Constructor(cd) => {
            let mut ch = params(&cd.params);
            ch.push(block_tree(&cd.body));
            Tree::node(format!("ctor {}{}", mods(&cd.modifiers), cd.name), ch)
        }
        MemberBody::Nested(n) => class_tree(n),
        MemberBody::StaticBlock(sb) => Tree::node("static", vec![block_tree(&sb.body)]),
    }
}

fn block_tree(b: &Block) -> Tree {
    Tree::node("block", b.stmts.iter().map(stmt_tree).collect())
}

fn stmt_tree(s: &Stmt) -> Tree {
    match &s.kind {
        StmtKind::Block(b) => block_tree(b),
        StmtKind::Local { ty, name, init } => Tree::node(format!("local {ty} {name}"), vec![expr_tree(init)]),
        StmtKind::Assign { target, value } => Tree::node("assign", vec![expr_tree(target), expr_tree(value)]),
        StmtKind::Expr(e) => Tree::node("expr", vec![expr_tree(e)]),
        StmtKind::If { cond, then_branch, else_branch } => {
            let mut ch = vec![expr_tree(cond), stmt_tree(then_branch)];
            ch.extend(else_branch.iter().map(|e| stmt_tree(e)));
            Tree::node("if", ch)
        }
        StmtKind::While { cond, body } => Tree::node("while", vec![expr_tree(cond), stmt_tree(body)]),
        StmtKind::Try { body, catch_ty, catch_name, handler } => {
            Tree::node(format!("try {catch_ty} {catch_name}"), vec![block_tree(body), block_tree(handler)])
        }
        StmtKind::Throw(e) => Tree::node("throw", vec![expr_tree(e)]),
        StmtKind::Return(e) => Tree::node("return", e.iter().map(expr_tree).collect()),
        StmtKind::Break => Tree::leaf("break"),
        StmtKind::Continue => Tree::leaf("continue"),
        StmtKind::Print(e) => Tree::node("print", vec![expr_tree(e)]),
        StmtKind::SuperCall(args) => Tree::node("super", args.iter().map(expr_tree).collect()),
    }
}

fn expr_tree(e: &Expr) -> Tree {
    match &e.kind {
        ExprKind::Int(n) => Tree::leaf(format!("int {n}")),
        ExprKind::Str(s) => Tree::leaf(format!("str {s:?}")),
        ExprKind::Bool(b) => Tree::leaf(format!("bool {b}")),
        ExprKind::Null => Tree::leaf("null"),
        ExprKind::This => Tree::leaf("this"),
        ExprKind::Name(n) => Tree::leaf(format!("name {n}")),
        ExprKind::Field { target, name } => Tree::node(format!("field-access {name}"), vec![expr_tree(target)]),
        ExprKind::Call { target, name, args } => {
            let mut ch: Vec<Tree> = target.iter().map(|t| expr_tree(t)).collect();
            ch.extend(args.iter().map(expr_tree));
            let label = if target.is_some() { format!("call .{name}") } else { format!("call {name}") };
            Tree::node(label, ch)
        }
        ExprKind::New { class, args } => Tree::node(format!("new {class}"), args.iter().map(expr_tree).collect()),
        ExprKind::Binary { op, lhs, rhs } => {
            Tree::node(format!("binop {}", op.symbol()), vec![expr_tree(lhs), expr_tree(rhs)])
        }
        ExprKind::Unary { op, operand } => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            };
            Tree::node(format!("unop {sym}"), vec![expr_tree(operand)])
        }
        ExprKind::Cast { ty, expr } => Tree::node(format!("cast {ty}"), vec![expr_tree(expr)]),
    }
}
