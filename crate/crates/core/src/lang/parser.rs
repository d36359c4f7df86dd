use super::ast::*;
use super::diag::Diagnostic;
use super::lexer::{lex, Tok, Token};

/// Result of parsing with recovery from non-structural lexical errors.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    /// Present whenever the token stream could be assembled into a tree.
    pub ast: Option<ClassAst>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses one MiniJ source file. Any error diagnostic makes this fail.
pub fn parse(src: &str) -> Result<ClassAst, Vec<Diagnostic>> {
    let out = parse_recovering(src);
    match out.ast {
        Some(ast) if !super::diag::has_errors(&out.diagnostics) => Ok(ast),
        _ => Err(out.diagnostics),
    }
}

/// Parses one source file, keeping the tree when the only problems are
/// recoverable lexical ones (such as a line break inside a string literal).
pub fn parse_recovering(src: &str) -> ParseOutcome {
    let (tokens, mut diagnostics, fatal) = lex(src);
    if fatal {
        return ParseOutcome { ast: None, diagnostics };
    }
    let mut p = Parser { toks: tokens, pos: 0, src_len: src.len() };
    match p.file() {
        Ok(ast) => ParseOutcome { ast: Some(ast), diagnostics },
        Err(d) => {
            diagnostics.push(d);
            ParseOutcome { ast: None, diagnostics }
        }
    }
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        if *tok == Tok::Eof {
            Diagnostic::error("unexpected end of input", Span::new(self.src_len, self.src_len))
        } else {
            Diagnostic::error(format!("expected {expected}, found {}", tok.describe()), self.span())
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            let what = match &t {
                Tok::Semi => "`;`".to_string(),
                other => other.describe(),
            };
            Err(self.unexpected(&what))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn qname(&mut self) -> PResult<(String, Span)> {
        let (mut name, mut span) = self.ident()?;
        while *self.peek() == Tok::Dot && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            let (seg, s) = self.ident()?;
            name.push('.');
            name.push_str(&seg);
            span = span.join(s);
        }
        Ok((name, span))
    }

    fn file(&mut self) -> PResult<ClassAst> {
        let class = self.class_decl(true)?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(class)
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut m = Modifiers::default();
        loop {
            match self.peek() {
                Tok::Public => m.public = true,
                Tok::Private => m.private = true,
                Tok::Static if *self.peek_at(1) != Tok::LBrace => m.is_static = true,
                Tok::Final => m.is_final = true,
                _ => return m,
            }
            self.bump();
        }
    }

    fn class_decl(&mut self, top_level: bool) -> PResult<ClassAst> {
        let start = self.span().start;
        let modifiers = self.modifiers();
        self.class_after_modifiers(start, modifiers, top_level)
    }

    fn class_after_modifiers(&mut self, start: usize, modifiers: Modifiers, top_level: bool) -> PResult<ClassAst> {
        self.expect(Tok::Class)?;
        let (name, _) = if top_level { self.qname()? } else { self.ident()? };
        let superclass = if self.eat(&Tok::Extends) { Some(self.qname()?) } else { None };
        let header_span = Span::new(start, self.prev_end());
        let body_start = self.expect(Tok::LBrace)?.start;
        let mut members = Vec::new();
        let mut static_blocks = 0;
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            members.push(self.member(&name, top_level, &mut static_blocks)?);
        }
        let end = self.bump().span.end;
        Ok(ClassAst {
            name,
            header: ClassHeader { modifiers, superclass, span: header_span },
            members,
            span: Span::new(start, end),
            body_span: Span::new(body_start, end),
            source_len: self.src_len,
        })
    }

    fn member(&mut self, class_name: &str, top_level: bool, static_blocks: &mut usize) -> PResult<TypeMember> {
        let start = self.span().start;
        let modifiers = self.modifiers();
        let simple = class_name.rsplit('.').next().unwrap_or(class_name).to_string();
        let body = match self.peek().clone() {
            Tok::Static => {
                self.bump();
                if !modifiers.is_empty() {
                    return Err(Diagnostic::error(
                        "modifiers are not allowed on a static block",
                        Span::new(start, self.prev_end()),
                    ));
                }
                let body = self.block()?;
                let ordinal = *static_blocks;
                *static_blocks += 1;
                MemberBody::StaticBlock(StaticBlock { ordinal, body })
            }
            Tok::Class => {
                if !top_level {
                    return Err(Diagnostic::error("classes may only be nested one level deep", self.span()));
                }
                MemberBody::Nested(Box::new(self.class_after_modifiers(start, modifiers, false)?))
            }
            Tok::Ident(n) if n == simple && *self.peek_at(1) == Tok::LParen => {
                let (name, _) = self.ident()?;
                let params = self.params()?;
                let body = self.block()?;
                MemberBody::Constructor(CtorDecl { modifiers, name, params, body })
            }
            _ => {
                let ret = if self.eat(&Tok::Void) { Type::Void } else { self.ty()? };
                let (name, _) = self.ident()?;
                if *self.peek() == Tok::LParen {
                    let params = self.params()?;
                    let body = self.block()?;
                    MemberBody::Method(MethodDecl { modifiers, ret, name, params, body })
                } else {
                    if ret == Type::Void {
                        return Err(Diagnostic::error(
                            "fields cannot have type void",
                            Span::new(start, self.prev_end()),
                        ));
                    }
                    let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
                    self.expect(Tok::Semi)?;
                    MemberBody::Field(FieldDecl { modifiers, ty: ret, name, init })
                }
            }
        };
        Ok(TypeMember::new(body, Span::new(start, self.prev_end())))
    }

    fn ty(&mut self) -> PResult<Type> {
        Ok(match self.peek() {
            Tok::IntTy => {
                self.bump();
                Type::Int
            }
            Tok::BoolTy => {
                self.bump();
                Type::Bool
            }
            Tok::StrTy => {
                self.bump();
                Type::Str
            }
            Tok::Ident(_) => Type::Class(self.qname()?.0),
            _ => return Err(self.unexpected("type")),
        })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(params);
        }
        loop {
            let start = self.span().start;
            let ty = self.ty()?;
            let (name, _) = self.ident()?;
            params.push(Param { ty, name, span: Span::new(start, self.prev_end()) });
            if self.eat(&Tok::RParen) {
                return Ok(params);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect(Tok::LBrace)?.start;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        let end = self.bump().span.end;
        Ok(Block { stmts, span: Span::new(start, end) })
    }

    /// Does the token stream at the cursor start a local declaration
    /// (`T name =` with `T` a keyword type or a dotted class name)?
    fn at_local_decl(&self) -> bool {
        match self.peek() {
            Tok::IntTy | Tok::BoolTy | Tok::StrTy => true,
            Tok::Ident(_) => {
                let mut i = 1;
                while *self.peek_at(i) == Tok::Dot && matches!(self.peek_at(i + 1), Tok::Ident(_)) {
                    i += 2;
                }
                matches!(self.peek_at(i), Tok::Ident(_))
            }
            _ => false,
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::LBrace => StmtKind::Block(self.block()?),
            Tok::If => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if self.eat(&Tok::Else) { Some(Box::new(self.stmt()?)) } else { None };
                StmtKind::If { cond, then_branch, else_branch }
            }
            Tok::While => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                StmtKind::While { cond, body: Box::new(self.stmt()?) }
            }
            Tok::Try => {
                self.bump();
                let body = self.block()?;
                self.expect(Tok::Catch)?;
                self.expect(Tok::LParen)?;
                let (catch_ty, _) = self.qname()?;
                let (catch_name, _) = self.ident()?;
                self.expect(Tok::RParen)?;
                let handler = self.block()?;
                StmtKind::Try { body, catch_ty, catch_name, handler }
            }
            Tok::Throw => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Throw(e)
            }
            Tok::Return => {
                self.bump();
                let e = if *self.peek() == Tok::Semi { None } else { Some(self.expr()?) };
                self.expect(Tok::Semi)?;
                StmtKind::Return(e)
            }
            Tok::Break => {
                self.bump();
                self.expect(Tok::Semi)?;
                StmtKind::Break
            }
            Tok::Continue => {
                self.bump();
                self.expect(Tok::Semi)?;
                StmtKind::Continue
            }
            Tok::Print => {
                self.bump();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                StmtKind::Print(e)
            }
            Tok::Super => {
                self.bump();
                let args = self.args()?;
                self.expect(Tok::Semi)?;
                StmtKind::SuperCall(args)
            }
            _ if self.at_local_decl() => {
                let ty = self.ty()?;
                let (name, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                let init = self.expr()?;
                self.expect(Tok::Semi)?;
                StmtKind::Local { ty, name, init }
            }
            _ => {
                let e = self.expr()?;
                if self.eat(&Tok::Assign) {
                    if !matches!(e.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                        return Err(Diagnostic::error("invalid assignment target", e.span));
                    }
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    StmtKind::Assign { target: e, value }
                } else {
                    self.expect(Tok::Semi)?;
                    StmtKind::Expr(e)
                }
            }
        };
        Ok(Stmt::new(kind, Span::new(start, self.prev_end())))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    /// After `(`: is this a cast `(T) operand`?
    fn at_cast(&self) -> bool {
        let mut i = 1;
        match self.peek_at(i) {
            Tok::IntTy | Tok::BoolTy | Tok::StrTy => return *self.peek_at(2) == Tok::RParen,
            Tok::Ident(_) => {
                i += 1;
                while *self.peek_at(i) == Tok::Dot && matches!(self.peek_at(i + 1), Tok::Ident(_)) {
                    i += 2;
                }
            }
            _ => return false,
        }
        if *self.peek_at(i) != Tok::RParen {
            return false;
        }
        matches!(
            self.peek_at(i + 1),
            Tok::Ident(_)
                | Tok::Int(_)
                | Tok::Str(_)
                | Tok::LParen
                | Tok::New
                | Tok::This
                | Tok::True
                | Tok::False
                | Tok::Null
                | Tok::Bang
        )
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span().start;
        match self.peek() {
            Tok::Minus | Tok::Bang => {
                let op = if self.bump().tok == Tok::Minus { UnOp::Neg } else { UnOp::Not };
                let operand = self.unary()?;
                let span = Span::new(start, operand.span.end);
                Ok(Expr::new(ExprKind::Unary { op, operand: Box::new(operand) }, span))
            }
            Tok::LParen if self.at_cast() => {
                self.bump();
                let ty = self.ty()?;
                self.expect(Tok::RParen)?;
                let e = self.unary()?;
                let span = Span::new(start, e.span.end);
                Ok(Expr::new(ExprKind::Cast { ty, expr: Box::new(e) }, span))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let (name, nspan) = self.ident()?;
            if *self.peek() == Tok::LParen {
                let args = self.args()?;
                let span = Span::new(e.span.start, self.prev_end());
                e = Expr::new(ExprKind::Call { target: Some(Box::new(e)), name, args }, span);
            } else {
                let span = e.span.join(nspan);
                e = Expr::new(ExprKind::Field { target: Box::new(e), name }, span);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        let span = self.span();
        let kind = match tok {
            Tok::Int(n) => {
                self.bump();
                ExprKind::Int(n)
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            Tok::True => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Null => {
                self.bump();
                ExprKind::Null
            }
            Tok::This => {
                self.bump();
                ExprKind::This
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let args = self.args()?;
                    ExprKind::Call { target: None, name, args }
                } else {
                    ExprKind::Name(name)
                }
            }
            Tok::New => {
                self.bump();
                let (class, _) = self.qname()?;
                let args = self.args()?;
                ExprKind::New { class, args }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(Expr::new(inner.kind, Span::new(span.start, self.prev_end())));
            }
            _ => return Err(self.unexpected("expression")),
        };
        Ok(Expr::new(kind, Span::new(span.start, self.prev_end())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_class_has_no_members() {
        let ast = parse("class A {}").unwrap();
        assert_eq!(ast.name, "A");
        assert!(ast.members.is_empty());
    }

    #[test]
    fn truncated_input_reports_eof() {
        let src = "class A { int f(";
        let diags = parse(src).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unexpected end of input");
        assert_eq!(diags[0].span, Span::new(src.len(), src.len()));
    }

    #[test]
    fn member_kinds_and_spans() {
        let src = "class p.C extends Object {\n  static final int K = 3;\n  C(int a) { super(); }\n  static { print(1); }\n  int get() { return 1; }\n  class N { }\n}\n";
        let ast = parse(src).unwrap();
        let kinds: Vec<_> = ast.members.iter().map(|m| m.kind()).collect();
        assert_eq!(
            kinds,
            vec![
                MemberKind::Field,
                MemberKind::Constructor,
                MemberKind::StaticBlock,
                MemberKind::Method,
                MemberKind::NestedClass
            ]
        );
        for w in ast.members.windows(2) {
            assert!(w[0].span.end <= w[1].span.start);
        }
        for m in &ast.members {
            assert!(ast.body_span.contains(&m.span));
        }
        assert_eq!(&src[ast.members[0].span.start..ast.members[0].span.end], "static final int K = 3;");
    }

    #[test]
    fn cast_versus_parenthesized() {
        let ast = parse("class A { static str f(str s) { return g((Object) s) + (s); } }").unwrap();
        let MemberBody::Method(m) = &ast.members[0].body else { panic!() };
        let StmtKind::Return(Some(e)) = &m.body.stmts[0].kind else { panic!() };
        let ExprKind::Binary { lhs, rhs, .. } = &e.kind else { panic!() };
        let ExprKind::Call { args, .. } = &lhs.kind else { panic!() };
        assert!(matches!(args[0].kind, ExprKind::Cast { .. }));
        assert!(matches!(rhs.kind, ExprKind::Name(_)));
    }

    #[test]
    fn qualified_local_declaration() {
        let ast = parse("class A { void f() { p.q.R r = new p.q.R(); r.go(); } }").unwrap();
        let MemberBody::Method(m) = &ast.members[0].body else { panic!() };
        assert!(matches!(&m.body.stmts[0].kind, StmtKind::Local { ty: Type::Class(c), .. } if c == "p.q.R"));
        assert!(matches!(&m.body.stmts[1].kind, StmtKind::Expr(_)));
    }

    #[test]
    fn broken_string_keeps_tree() {
        let out = parse_recovering("class A { static final str B = \"{}\n\"; }");
        assert!(out.ast.is_some());
        assert_eq!(out.diagnostics.len(), 1);
        assert!(parse("class A { static final str B = \"{}\n\"; }").is_err());
    }
}
