use super::ast::{ClassAst, Span};
use super::diag::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotateError {
    #[error("diagnostic span {start}..{end} lies outside a file of {len} bytes")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },
}

/// Marks every member overlapped by an error diagnostic as errored.
///
/// Returns the annotated tree and the number of error diagnostics that hit
/// no member at all (class-level errors, e.g. in the header).
pub fn annotate_errors(ast: &ClassAst, diags: &[Diagnostic]) -> Result<(ClassAst, usize), AnnotateError> {
    let mut out = ast.clone();
    let mut class_level = 0;
    for d in diags.iter().filter(|d| d.is_error()) {
        check_bounds(d.span, ast.source_len)?;
        let mut hit = false;
        for m in &mut out.members {
            if m.span.overlaps(&d.span) {
                m.errored = true;
                hit = true;
            }
        }
        if !hit {
            class_level += 1;
        }
    }
    Ok((out, class_level))
}

fn check_bounds(span: Span, len: usize) -> Result<(), AnnotateError> {
    if span.start > span.end || span.end > len {
        return Err(AnnotateError::SpanOutOfBounds { start: span.start, end: span.end, len });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse, parse_recovering};
    use super::*;

    #[test]
    fn flags_only_the_enclosing_member() {
        let src = "class A {\n  static final str S = \"x\ny\";\n  int f() { return 1; }\n}\n";
        let out = parse_recovering(src);
        let (ast, class_level) = annotate_errors(out.ast.as_ref().unwrap(), &out.diagnostics).unwrap();
        assert_eq!(class_level, 0);
        assert!(ast.members[0].errored);
        assert!(!ast.members[1].errored);
    }

    #[test]
    fn header_error_is_class_level() {
        let src = "class A extends B { int f() { return 1; } }";
        let ast = parse(src).unwrap();
        let d = Diagnostic::error("cannot find symbol", Span::new(16, 17));
        let (ast, class_level) = annotate_errors(&ast, &[d]).unwrap();
        assert_eq!(class_level, 1);
        assert!(ast.members.iter().all(|m| !m.errored));
    }

    #[test]
    fn out_of_bounds_is_rejected() {
        let ast = parse("class A {}").unwrap();
        let d = Diagnostic::error("x", Span::new(3, 99));
        assert!(annotate_errors(&ast, &[d]).is_err());
    }
}
