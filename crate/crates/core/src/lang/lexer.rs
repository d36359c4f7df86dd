use super::ast::Span;
use super::diag::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Class,
    Extends,
    Public,
    Private,
    Static,
    Final,
    Void,
    IntTy,
    BoolTy,
    StrTy,
    If,
    Else,
    While,
    Try,
    Catch,
    Throw,
    Return,
    Break,
    Continue,
    New,
    This,
    Super,
    True,
    False,
    Null,
    Print,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    Bang,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Class => "class",
            Tok::Extends => "extends",
            Tok::Public => "public",
            Tok::Private => "private",
            Tok::Static => "static",
            Tok::Final => "final",
            Tok::Void => "void",
            Tok::IntTy => "int",
            Tok::BoolTy => "bool",
            Tok::StrTy => "str",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::While => "while",
            Tok::Try => "try",
            Tok::Catch => "catch",
            Tok::Throw => "throw",
            Tok::Return => "return",
            Tok::Break => "break",
            Tok::Continue => "continue",
            Tok::New => "new",
            Tok::This => "this",
            Tok::Super => "super",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Null => "null",
            Tok::Print => "print",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Assign => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Bang => "!",
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "class" => Tok::Class,
        "extends" => Tok::Extends,
        "public" => Tok::Public,
        "private" => Tok::Private,
        "static" => Tok::Static,
        "final" => Tok::Final,
        "void" => Tok::Void,
        "int" => Tok::IntTy,
        "bool" => Tok::BoolTy,
        "str" => Tok::StrTy,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "try" => Tok::Try,
        "catch" => Tok::Catch,
        "throw" => Tok::Throw,
        "return" => Tok::Return,
        "break" => Tok::Break,
        "continue" => Tok::Continue,
        "new" => Tok::New,
        "this" => Tok::This,
        "super" => Tok::Super,
        "true" => Tok::True,
        "false" => Tok::False,
        "null" => Tok::Null,
        "print" => Tok::Print,
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const MAX_INT_LITERAL: i64 = 2_147_483_648;

/// Splits `src` into tokens.
///
/// Returns the token stream together with lexical diagnostics. A string
/// literal broken by a raw line break is reported as an error but still
/// yields a token holding the text up to the closing quote, so the parser
/// can keep going and the error stays attached to the enclosing member.
/// Any other lexical error is fatal and reported by the second element.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>, bool) {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    let mut fatal = false;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            while i + 1 < bytes.len() && !(bytes[i] == b'*' && bytes[i + 1] == b'/') {
                i += 1;
            }
            if i + 1 >= bytes.len() {
                diags.push(Diagnostic::error("unterminated comment", Span::new(start, src.len())));
                fatal = true;
                break;
            }
            i += 2;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            toks.push(Token { tok, span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let span = Span::new(start, i);
            match src[start..i].parse::<i64>() {
                Ok(n) if n <= MAX_INT_LITERAL => toks.push(Token { tok: Tok::Int(n), span }),
                _ => {
                    diags.push(Diagnostic::error("integer literal out of range", span));
                    toks.push(Token { tok: Tok::Int(0), span });
                }
            }
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut value = String::new();
            let mut broken = false;
            let mut closed = false;
            while i < bytes.len() {
                let ch = src[i..].chars().next().unwrap();
                match ch {
                    '"' => {
                        i += 1;
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let esc = src[i + 1..].chars().next();
                        let decoded = match esc {
                            Some('n') => Some('\n'),
                            Some('t') => Some('\t'),
                            Some('"') => Some('"'),
                            Some('\\') => Some('\\'),
                            _ => None,
                        };
                        match decoded {
                            Some(d) => {
                                value.push(d);
                                i += 2;
                            }
                            None => {
                                let len = 1 + esc.map_or(0, char::len_utf8);
                                diags.push(Diagnostic::error(
                                    "illegal escape character in string literal",
                                    Span::new(i, i + len),
                                ));
                                i += len;
                            }
                        }
                    }
                    '\n' => {
                        broken = true;
                        value.push('\n');
                        i += 1;
                    }
                    other => {
                        value.push(other);
                        i += other.len_utf8();
                    }
                }
            }
            let span = Span::new(start, i);
            if !closed {
                diags.push(Diagnostic::error("unclosed string literal", span));
                fatal = true;
                break;
            }
            if broken {
                diags.push(Diagnostic::error("unclosed string literal", span));
            }
            toks.push(Token { tok: Tok::Str(value), span });
            continue;
        }
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let (tok, len) = match two {
            "<=" => (Tok::Le, 2),
            ">=" => (Tok::Ge, 2),
            "==" => (Tok::EqEq, 2),
            "!=" => (Tok::NotEq, 2),
            _ => {
                let t = match c {
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b';' => Tok::Semi,
                    b',' => Tok::Comma,
                    b'.' => Tok::Dot,
                    b'=' => Tok::Assign,
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'%' => Tok::Percent,
                    b'<' => Tok::Lt,
                    b'>' => Tok::Gt,
                    b'!' => Tok::Bang,
                    _ => {
                        let ch = src[i..].chars().next().unwrap();
                        diags.push(Diagnostic::error(
                            format!("unexpected character `{ch}`"),
                            Span::new(i, i + ch.len_utf8()),
                        ));
                        fatal = true;
                        break;
                    }
                };
                (t, 1)
            }
        };
        toks.push(Token { tok, span: Span::new(i, i + len) });
        i += len;
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    (toks, diags, fatal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_newline_in_string_is_recoverable() {
        let (toks, diags, fatal) = lex("x = \"a\nb\";");
        assert!(!fatal);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unclosed string literal");
        assert!(toks.iter().any(|t| t.tok == Tok::Str("a\nb".into())));
    }

    #[test]
    fn unterminated_string_is_fatal() {
        let (_, diags, fatal) = lex("\"abc");
        assert!(fatal);
        assert_eq!(diags[0].span, Span::new(0, 4));
    }

    #[test]
    fn two_char_operators() {
        let (toks, _, _) = lex("a<=b!=c");
        let kinds: Vec<_> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![Tok::Ident("a".into()), Tok::Le, Tok::Ident("b".into()), Tok::NotEq, Tok::Ident("c".into()), Tok::Eof]
        );
    }
}
