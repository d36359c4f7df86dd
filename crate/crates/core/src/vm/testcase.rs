//! Test cases and the `.tj` test file format.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::format::FormatError;
use crate::lang::printer::escape_str;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arg {
    Int(i32),
    Bool(bool),
    Str(String),
    Null,
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Int(n) => write!(f, "{n}"),
            Arg::Bool(b) => write!(f, "{b}"),
            Arg::Str(s) => f.write_str(&escape_str(s, false)),
            Arg::Null => f.write_str("null"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Normal,
    Throws(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Normal => f.write_str("normal"),
            Outcome::Throws(t) => write!(f, "throws:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    /// `owner.name(T1,T2)` of a static method.
    pub entry: String,
    pub args: Vec<Arg>,
    pub expected_stdout: String,
    pub expected_outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail(String),
    Timeout,
    Crash(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub verdicts: Vec<(String, Verdict)>,
    pub elapsed_ms: u64,
}

impl TestReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.is_pass())
    }

    pub fn passed(&self) -> usize {
        self.verdicts.iter().filter(|(_, v)| v.is_pass()).count()
    }
}

pub fn tests_to_text(tests: &[TestCase]) -> String {
    let mut out = String::new();
    for (i, t) in tests.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("TEST {}\nENTRY {}\n", t.id, t.entry));
        let args: Vec<String> = t.args.iter().map(|a| a.to_string()).collect();
        if args.is_empty() {
            out.push_str("ARGS\n");
        } else {
            out.push_str(&format!("ARGS {}\n", args.join(" ")));
        }
        out.push_str(&format!("EXPECT {}\n", escape_str(&t.expected_stdout, false)));
        out.push_str(&format!("OUTCOME {}\n", t.expected_outcome));
    }
    out
}

fn unquote(s: &str) -> Option<(String, &str)> {
    let rest = s.strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = rest.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, &rest[i + 1..])),
            '\\' => match chars.next()?.1 {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                _ => return None,
            },
            c => out.push(c),
        }
    }
    None
}

fn parse_args(mut s: &str) -> Option<Vec<Arg>> {
    let mut args = Vec::new();
    loop {
        s = s.trim_start();
        if s.is_empty() {
            return Some(args);
        }
        if s.starts_with('"') {
            let (v, rest) = unquote(s)?;
            args.push(Arg::Str(v));
            s = rest;
            continue;
        }
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        let word = &s[..end];
        args.push(match word {
            "true" => Arg::Bool(true),
            "false" => Arg::Bool(false),
            "null" => Arg::Null,
            n => Arg::Int(n.parse().ok()?),
        });
        s = &s[end..];
    }
}

pub fn parse_tests(text: &str) -> Result<Vec<TestCase>, FormatError> {
    let mut tests: Vec<TestCase> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |m: &str| FormatError { line, message: m.to_string() };
        let l = raw.trim_end();
        if l.trim().is_empty() {
            continue;
        }
        let (key, rest) = l.split_once(' ').unwrap_or((l, ""));
        if key == "TEST" {
            tests.push(TestCase {
                id: rest.trim().to_string(),
                entry: String::new(),
                args: Vec::new(),
                expected_stdout: String::new(),
                expected_outcome: Outcome::Normal,
            });
            continue;
        }
        let t = tests.last_mut().ok_or_else(|| err("expected TEST"))?;
        match key {
            "ENTRY" => t.entry = rest.trim().to_string(),
            "ARGS" => t.args = parse_args(rest).ok_or_else(|| err("malformed ARGS"))?,
            "EXPECT" => {
                let (v, tail) = unquote(rest.trim()).ok_or_else(|| err("malformed EXPECT literal"))?;
                if !tail.trim().is_empty() {
                    return Err(err("trailing text after EXPECT literal"));
                }
                t.expected_stdout = v;
            }
            "OUTCOME" => {
                let r = rest.trim();
                t.expected_outcome = if r == "normal" {
                    Outcome::Normal
                } else if let Some(ty) = r.strip_prefix("throws:") {
                    Outcome::Throws(ty.to_string())
                } else {
                    return Err(err("OUTCOME must be normal or throws:<Type>"));
                };
            }
            other => return Err(err(&format!("unknown key `{other}`"))),
        }
    }
    Ok(tests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let ts = vec![
            TestCase {
                id: "t1".into(),
                entry: "p.C.f(int,str)".into(),
                args: vec![Arg::Int(-3), Arg::Str("a b\n\"q\"".into()), Arg::Bool(true), Arg::Null],
                expected_stdout: "16\n".into(),
                expected_outcome: Outcome::Normal,
            },
            TestCase {
                id: "t2".into(),
                entry: "p.C.g()".into(),
                args: vec![],
                expected_stdout: String::new(),
                expected_outcome: Outcome::Throws("ArithmeticException".into()),
            },
        ];
        assert_eq!(parse_tests(&tests_to_text(&ts)).unwrap(), ts);
    }
}
