//! Loop clean-ups applied by the sugaring backend.

use super::ir::*;

fn simple(e: &IExpr) -> bool {
    matches!(e, IExpr::Int(_) | IExpr::Bool(_) | IExpr::Str(_) | IExpr::Null | IExpr::This | IExpr::Local(_))
}

/// `while (true) { ...; try { B } catch (..) { H } break; } return e;`
/// with a handler that never falls through becomes
/// `while (true) { ...; try { B; return e; } catch (..) { H } }`.
pub fn sink_tail_return(stmts: &mut Vec<IStmt>) {
    for s in stmts.iter_mut() {
        for b in s.blocks_mut() {
            sink_tail_return(b);
        }
    }
    let n = stmts.len();
    if n < 2 {
        return;
    }
    let IStmt::Return(Some(e)) = &stmts[n - 1] else { return };
    if !simple(e) {
        return;
    }
    let e = e.clone();
    let IStmt::While { cond: None, body } = &mut stmts[n - 2] else { return };
    let m = body.len();
    if m < 2 || body[m - 1] != IStmt::Break || has_break(&body[..m - 1]) {
        return;
    }
    let IStmt::Try { body: tb, handler, .. } = &mut body[m - 2] else { return };
    if can_complete(handler) || !can_complete(tb) {
        return;
    }
    tb.push(IStmt::Return(Some(e)));
    body.pop();
    stmts.pop();
}

/// Drops `continue` statements that are the last action of a loop body.
pub fn drop_tail_continues(stmts: &mut [IStmt]) {
    for s in stmts.iter_mut() {
        if let IStmt::While { body, .. } = s {
            strip_tail(body);
        }
        for b in s.blocks_mut() {
            drop_tail_continues(b);
        }
    }
}

fn strip_tail(body: &mut Vec<IStmt>) {
    if body.last() == Some(&IStmt::Continue) {
        body.pop();
        return;
    }
    match body.last_mut() {
        Some(IStmt::Try { body: tb, handler, .. }) => {
            strip_tail(tb);
            strip_tail(handler);
        }
        Some(IStmt::If { then, els, .. }) => {
            strip_tail(then);
            if let Some(e) = els {
                strip_tail(e);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinks_return_into_try() {
        let mut s = vec![
            IStmt::While {
                cond: None,
                body: vec![
                    IStmt::Try {
                        body: vec![IStmt::Store(1, IExpr::Int(2))],
                        catch_type: "RuntimeException".into(),
                        slot: 2,
                        handler: vec![IStmt::Continue],
                    },
                    IStmt::Break,
                ],
            },
            IStmt::Return(Some(IExpr::Local(1))),
        ];
        sink_tail_return(&mut s);
        drop_tail_continues(&mut s);
        assert_eq!(s.len(), 1);
        let IStmt::While { body, .. } = &s[0] else { panic!() };
        assert_eq!(body.len(), 1);
        let IStmt::Try { body: tb, handler, .. } = &body[0] else { panic!() };
        assert_eq!(tb.last(), Some(&IStmt::Return(Some(IExpr::Local(1)))));
        assert!(handler.is_empty());
    }
}
