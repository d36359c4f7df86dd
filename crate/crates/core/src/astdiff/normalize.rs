//! Alpha-renaming of parameters and local variables.

use crate::lang::*;

/// Renames parameters to `p0, p1, ..` and locals (including catch
/// variables) to `l0, l1, ..` in declaration order, per member. A name
/// reused in disjoint scopes gets distinct indices. Member and type names
/// are left alone.
pub fn normalize_names(ast: &ClassAst) -> ClassAst {
    let mut out = ast.clone();
    for m in &mut out.members {
        match &mut m.body {
            MemberBody::Method(md) => Renamer::default().member(&mut md.params, &mut md.body),
            MemberBody::Constructor(cd) => Renamer::default().member(&mut cd.params, &mut cd.body),
            MemberBody::StaticBlock(sb) => Renamer::default().block(&mut sb.body),
            MemberBody::Nested(n) => **n = normalize_names(n),
            MemberBody::Field(_) => {}
        }
    }
    out
}

#[derive(Default)]
struct Renamer {
    scopes: Vec<Vec<(String, String)>>,
    locals: usize,
}

impl Renamer {
    fn lookup(&self, n: &str) -> Option<&str> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).find(|(o, _)| o == n).map(|(_, c)| c.as_str())
    }

    fn bind_local(&mut self, name: &mut String) {
        let canon = format!("l{}", self.locals);
        self.locals += 1;
        self.scopes.last_mut().unwrap().push((std::mem::replace(name, canon.clone()), canon));
    }

    fn member(&mut self, params: &mut [Param], body: &mut Block) {
        let mut scope = Vec::new();
        for (i, p) in params.iter_mut().enumerate() {
            let canon = format!("p{i}");
            scope.push((std::mem::replace(&mut p.name, canon.clone()), canon));
        }
        self.scopes.push(scope);
        self.block(body);
        self.scopes.pop();
    }

    fn block(&mut self, b: &mut Block) {
        self.scopes.push(Vec::new());
        for s in &mut b.stmts {
            self.stmt(s);
        }
        self.scopes.pop();
    }

    fn sub(&mut self, s: &mut Stmt) {
        self.scopes.push(Vec::new());
        self.stmt(s);
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &mut Stmt) {
        match &mut s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::Local { name, init, .. } => {
                self.expr(init);
                self.bind_local(name);
            }
            StmtKind::Assign { target, value } => {
                self.expr(target);
                self.expr(value);
            }
            StmtKind::Expr(e) | StmtKind::Throw(e) | StmtKind::Print(e) => self.expr(e),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                self.expr(cond);
                self.sub(then_branch);
                if let Some(e) = else_branch {
                    self.sub(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.sub(body);
            }
            StmtKind::Try { body, catch_name, handler, .. } => {
                self.block(body);
                self.scopes.push(Vec::new());
                self.bind_local(catch_name);
                self.block(handler);
                self.scopes.pop();
            }
            StmtKind::SuperCall(args) => args.iter_mut().for_each(|a| self.expr(a)),
            StmtKind::Break | StmtKind::Continue => {}
        }
    }

    fn expr(&mut self, e: &mut Expr) {
        match &mut e.kind {
            ExprKind::Name(n) => {
                if let Some(c) = self.lookup(n) {
                    *n = c.to_string();
                }
            }
            ExprKind::Field { target, .. } => self.expr(target),
            ExprKind::Call { target, args, .. } => {
                if let Some(t) = target {
                    self.expr(t);
                }
                args.iter_mut().for_each(|a| self.expr(a));
            }
            ExprKind::New { args, .. } => args.iter_mut().for_each(|a| self.expr(a)),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::Cast { expr, .. } => self.expr(expr),
            _ => {}
        }
    }
}
