use std::fmt::Write;

use super::ast::*;

#[derive(Debug, Clone, Copy, Default)]
pub struct PrintOptions {
    /// Emit line breaks inside string constants verbatim instead of as `\n`.
    pub raw_newlines: bool,
}

pub fn pretty_print(ast: &ClassAst) -> String {
    pretty_print_with(ast, PrintOptions::default())
}

pub fn pretty_print_with(ast: &ClassAst, opts: PrintOptions) -> String {
    let mut p = Printer { out: String::new(), opts, indent: 0 };
    p.class(ast);
    p.out
}

/// Renders a single expression in source syntax.
pub fn print_expr(e: &Expr) -> String {
    let mut p = Printer { out: String::new(), opts: PrintOptions::default(), indent: 0 };
    p.expr(e);
    p.out
}

pub fn escape_str(s: &str, raw_newlines: bool) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' if !raw_newlines => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn modifiers_prefix(m: &Modifiers) -> String {
    let mut s = String::new();
    if m.public {
        s.push_str("public ");
    }
    if m.private {
        s.push_str("private ");
    }
    if m.is_static {
        s.push_str("static ");
    }
    if m.is_final {
        s.push_str("final ");
    }
    s
}

struct Printer {
    out: String,
    opts: PrintOptions,
    indent: usize,
}

impl Printer {
    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
    }

    fn class(&mut self, c: &ClassAst) {
        self.line_start();
        self.out.push_str(&modifiers_prefix(&c.header.modifiers));
        write!(self.out, "class {}", c.name).unwrap();
        if let Some((sup, _)) = &c.header.superclass {
            write!(self.out, " extends {sup}").unwrap();
        }
        self.out.push_str(" {\n");
        self.indent += 1;
        let mut prev: Option<MemberKind> = None;
        for m in &c.members {
            let k = m.kind();
            if prev.is_some() && !(prev == Some(MemberKind::Field) && k == MemberKind::Field) {
                self.out.push('\n');
            }
            self.member(m);
            prev = Some(k);
        }
        self.indent -= 1;
        self.line_start();
        self.out.push_str("}\n");
    }

    fn params(&mut self, ps: &[Param]) {
        self.out.push('(');
        for (i, p) in ps.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            write!(self.out, "{} {}", p.ty, p.name).unwrap();
        }
        self.out.push(')');
    }

    fn member(&mut self, m: &TypeMember) {
        match &m.body {
            MemberBody::Field(f) => {
                self.line_start();
                write!(self.out, "{}{} {}", modifiers_prefix(&f.modifiers), f.ty, f.name).unwrap();
                if let Some(init) = &f.init {
                    self.out.push_str(" = ");
                    self.expr(init);
                }
                self.out.push_str(";\n");
            }
            MemberBody::Method(md) => {
                self.line_start();
                write!(self.out, "{}{} {}", modifiers_prefix(&md.modifiers), md.ret, md.name).unwrap();
                self.params(&md.params);
                self.out.push(' ');
                self.block(&md.body);
                self.out.push('\n');
            }
            MemberBody::Constructor(c) => {
                self.line_start();
                write!(self.out, "{}{}", modifiers_prefix(&c.modifiers), c.name).unwrap();
                self.params(&c.params);
                self.out.push(' ');
                self.block(&c.body);
                self.out.push('\n');
            }
            MemberBody::Nested(c) => self.class(c),
            MemberBody::StaticBlock(sb) => {
                self.line_start();
                self.out.push_str("static ");
                self.block(&sb.body);
                self.out.push('\n');
            }
        }
    }

    /// Prints `{ ... }` starting at the current column; no trailing newline.
    fn block(&mut self, b: &Block) {
        self.out.push_str("{\n");
        self.indent += 1;
        for s in &b.stmts {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line_start();
        self.out.push('}');
    }

    /// Branch or loop body: braces inline for blocks, otherwise an
    /// indented statement on its own line. Returns true if a block was
    /// printed (the cursor then sits right after `}`).
    fn body(&mut self, s: &Stmt) -> bool {
        if let StmtKind::Block(b) = &s.kind {
            self.out.push(' ');
            self.block(b);
            true
        } else {
            self.out.push('\n');
            self.indent += 1;
            self.stmt(s);
            self.indent -= 1;
            false
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        self.line_start();
        self.stmt_inline(s);
    }

    /// Prints a statement whose indentation has already been written.
    fn stmt_inline(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(b) => {
                self.block(b);
                self.out.push('\n');
            }
            StmtKind::Local { ty, name, init } => {
                write!(self.out, "{ty} {name} = ").unwrap();
                self.expr(init);
                self.out.push_str(";\n");
            }
            StmtKind::Assign { target, value } => {
                self.expr(target);
                self.out.push_str(" = ");
                self.expr(value);
                self.out.push_str(";\n");
            }
            StmtKind::Expr(e) => {
                self.expr(e);
                self.out.push_str(";\n");
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                self.out.push_str("if (");
                self.expr(cond);
                self.out.push(')');
                let braced = self.body(then_branch);
                match else_branch {
                    None => {
                        if braced {
                            self.out.push('\n');
                        }
                    }
                    Some(e) => {
                        if braced {
                            self.out.push_str(" else");
                        } else {
                            self.line_start();
                            self.out.push_str("else");
                        }
                        if matches!(e.kind, StmtKind::If { .. }) {
                            self.out.push(' ');
                            self.stmt_inline(e);
                        } else if self.body(e) {
                            self.out.push('\n');
                        }
                    }
                }
            }
            StmtKind::While { cond, body } => {
                self.out.push_str("while (");
                self.expr(cond);
                self.out.push(')');
                if self.body(body) {
                    self.out.push('\n');
                }
            }
            StmtKind::Try { body, catch_ty, catch_name, handler } => {
                self.out.push_str("try ");
                self.block(body);
                write!(self.out, " catch ({catch_ty} {catch_name}) ").unwrap();
                self.block(handler);
                self.out.push('\n');
            }
            StmtKind::Throw(e) => {
                self.out.push_str("throw ");
                self.expr(e);
                self.out.push_str(";\n");
            }
            StmtKind::Return(None) => self.out.push_str("return;\n"),
            StmtKind::Return(Some(e)) => {
                self.out.push_str("return ");
                self.expr(e);
                self.out.push_str(";\n");
            }
            StmtKind::Break => self.out.push_str("break;\n"),
            StmtKind::Continue => self.out.push_str("continue;\n"),
            StmtKind::Print(e) => {
                self.out.push_str("print(");
                self.expr(e);
                self.out.push_str(");\n");
            }
            StmtKind::SuperCall(args) => {
                self.out.push_str("super");
                self.args(args);
                self.out.push_str(";\n");
            }
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a);
        }
        self.out.push(')');
    }

    fn paren_expr(&mut self, e: &Expr, parens: bool) {
        if parens {
            self.out.push('(');
        }
        self.expr(e);
        if parens {
            self.out.push(')');
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Int(n) => {
                if *n < 0 {
                    write!(self.out, "({n})").unwrap();
                } else {
                    write!(self.out, "{n}").unwrap();
                }
            }
            ExprKind::Str(s) => self.out.push_str(&escape_str(s, self.opts.raw_newlines)),
            ExprKind::Bool(b) => write!(self.out, "{b}").unwrap(),
            ExprKind::Null => self.out.push_str("null"),
            ExprKind::This => self.out.push_str("this"),
            ExprKind::Name(n) => self.out.push_str(n),
            ExprKind::Field { target, name } => {
                self.paren_expr(target, needs_parens_as_target(target));
                write!(self.out, ".{name}").unwrap();
            }
            ExprKind::Call { target, name, args } => {
                if let Some(t) = target {
                    self.paren_expr(t, needs_parens_as_target(t));
                    self.out.push('.');
                }
                self.out.push_str(name);
                self.args(args);
            }
            ExprKind::New { class, args } => {
                write!(self.out, "new {class}").unwrap();
                self.args(args);
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                let lp = matches!(&lhs.kind, ExprKind::Binary { op: l, .. } if l.precedence() < prec);
                let rp = matches!(&rhs.kind, ExprKind::Binary { op: r, .. } if r.precedence() <= prec);
                self.paren_expr(lhs, lp);
                write!(self.out, " {} ", op.symbol()).unwrap();
                self.paren_expr(rhs, rp);
            }
            ExprKind::Unary { op, operand } => {
                self.out.push(match op {
                    UnOp::Neg => '-',
                    UnOp::Not => '!',
                });
                self.paren_expr(operand, matches!(operand.kind, ExprKind::Binary { .. }));
            }
            ExprKind::Cast { ty, expr } => {
                write!(self.out, "({ty}) ").unwrap();
                self.paren_expr(
                    expr,
                    matches!(
                        expr.kind,
                        ExprKind::Binary { .. } | ExprKind::Unary { .. } | ExprKind::Int(i64::MIN..=-1)
                    ),
                );
            }
        }
    }
}

fn needs_parens_as_target(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Binary { .. } | ExprKind::Unary { .. } | ExprKind::Cast { .. } | ExprKind::Int(_))
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    fn roundtrip(src: &str) {
        let a = parse(src).unwrap();
        let printed = pretty_print(&a);
        let b = parse(&printed).unwrap_or_else(|d| panic!("{printed}\n{d:?}"));
        assert!(a.same_structure(&b), "{printed}");
        assert_eq!(printed, pretty_print(&b));
    }

    #[test]
    fn empty_class() {
        assert_eq!(pretty_print(&parse("class A{}").unwrap()), "class A {\n}\n");
    }

    #[test]
    fn precedence_and_assoc() {
        roundtrip("class A { int f(int a, int b) { return a - (b - 1) * (a + b) % 3; } }");
        roundtrip("class A { bool f(int a) { return (a < 1) == (a > 2); } }");
        roundtrip("class A { int f(int a) { return -(a + 1) - -1; } }");
    }

    #[test]
    fn control_flow() {
        roundtrip(
            "class A { void f(int a) { if (a < 1) print(1); else if (a < 2) { print(2); } else print(3); \
             while (true) { try { a = a / 0; } catch (ArithmeticException e) { break; } } \
             if (a == 0) print(4); { print(5); } } }",
        );
    }

    #[test]
    fn strings_escape() {
        let a = parse("class A { static final str S = \"a\\nb\\\"c\\\\\"; }").unwrap();
        let text = pretty_print(&a);
        assert!(text.contains("\"a\\nb\\\"c\\\\\""));
        let raw = pretty_print_with(&a, PrintOptions { raw_newlines: true });
        assert!(parse(&raw).is_err());
    }
}
