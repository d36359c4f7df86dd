//! Textual `.mjc` assembly: serialization and parsing.

use std::fmt::Write;

use super::model::*;
use crate::lang::printer::escape_str;
use crate::lang::Type;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

pub fn parse_type(s: &str) -> Type {
    match s {
        "int" => Type::Int,
        "bool" => Type::Bool,
        "str" => Type::Str,
        "void" => Type::Void,
        other => Type::Class(other.to_string()),
    }
}

fn const_payload(c: &Const) -> String {
    match c {
        Const::Int(n) => n.to_string(),
        Const::Str(s) => escape_str(s, false),
        Const::Class(c) => c.clone(),
        Const::Field(f) => format!("{}#{}:{}", f.owner, f.name, f.ty),
        Const::Method(m) => format!("{}:{}", m.key(), m.ret),
    }
}

fn const_value_text(v: &ConstValue) -> String {
    match v {
        ConstValue::Int(n) => n.to_string(),
        ConstValue::Bool(b) => b.to_string(),
        ConstValue::Str(s) => escape_str(s, false),
    }
}

/// Serializes a class (and its nested classes) to `.mjc` text.
pub fn to_text(bc: &BytecodeClass) -> String {
    let mut out = String::new();
    for c in bc.all_classes() {
        write_class(&mut out, c);
    }
    out
}

fn write_class(out: &mut String, c: &BytecodeClass) {
    writeln!(out, "CLASS {}", c.name).unwrap();
    writeln!(out, "SUPER {}", c.superclass).unwrap();
    writeln!(out, "FLAGS {}", c.flags).unwrap();
    out.push_str("POOL:\n");
    for (i, k) in c.pool.iter().enumerate() {
        writeln!(out, "#{i} {} {}", k.kind_name(), const_payload(k)).unwrap();
    }
    for f in &c.fields {
        write!(out, "FIELD {} {} {}", f.name, f.ty, f.flags).unwrap();
        if let Some(v) = &f.constant {
            write!(out, " const={}", const_value_text(v)).unwrap();
        }
        out.push('\n');
    }
    for m in &c.methods {
        let names = if m.param_names.is_empty() { "-".to_string() } else { m.param_names.join(",") };
        writeln!(
            out,
            "METHOD {} returns={} stack={} locals={} params={} flags={}",
            m.key(),
            m.ret,
            m.max_stack,
            m.max_locals,
            names,
            m.flags
        )
        .unwrap();
        for (i, insn) in m.code.iter().enumerate() {
            writeln!(out, "  {i}: {insn}").unwrap();
        }
        for h in &m.handlers {
            writeln!(out, "HANDLER {} {} {} {}", h.range.start, h.range.end, h.range.target, h.catch_type).unwrap();
        }
    }
    out.push_str("END\n");
}

/// Parses `.mjc` text. The first class is the top-level class; any
/// following classes become its nested classes.
pub fn from_text(text: &str) -> Result<BytecodeClass, FormatError> {
    let mut classes: Vec<BytecodeClass> = Vec::new();
    let mut cur: Option<BytecodeClass> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |m: &str| FormatError { line, message: m.to_string() };
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(name) = l.strip_prefix("CLASS ") {
            if cur.is_some() {
                return Err(err("CLASS before END"));
            }
            cur = Some(BytecodeClass::new(name.trim(), "Object"));
            continue;
        }
        let c = cur.as_mut().ok_or_else(|| err("content outside CLASS block"))?;
        if l == "END" {
            classes.push(cur.take().unwrap());
        } else if let Some(s) = l.strip_prefix("SUPER ") {
            c.superclass = s.trim().to_string();
        } else if let Some(s) = l.strip_prefix("FLAGS ") {
            c.flags = parse_flags(s.trim()).map_err(|m| err(&m))?;
        } else if l == "POOL:" {
        } else if l.starts_with('#') {
            let k = parse_pool_line(l).map_err(|m| err(&m))?;
            if k.0 != c.pool.len() {
                return Err(err("pool entries must be numbered consecutively"));
            }
            c.pool.push(k.1);
        } else if let Some(s) = l.strip_prefix("FIELD ") {
            c.fields.push(parse_field(s).map_err(|m| err(&m))?);
        } else if let Some(s) = l.strip_prefix("METHOD ") {
            c.methods.push(parse_method_header(s).map_err(|m| err(&m))?);
        } else if let Some(s) = l.strip_prefix("HANDLER ") {
            let m = c.methods.last_mut().ok_or_else(|| err("HANDLER outside METHOD"))?;
            m.handlers.push(parse_handler(s).map_err(|m| err(&m))?);
        } else if l.as_bytes()[0].is_ascii_digit() {
            let m = c.methods.last_mut().ok_or_else(|| err("instruction outside METHOD"))?;
            let (num, rest) = l.split_once(':').ok_or_else(|| err("expected `n: INSN`"))?;
            let n: usize = num.trim().parse().map_err(|_| err("bad instruction number"))?;
            if n != m.code.len() {
                return Err(err("instructions must be numbered consecutively"));
            }
            m.code.push(parse_insn(rest.trim()).map_err(|m| err(&m))?);
        } else {
            return Err(err(&format!("unrecognized line `{l}`")));
        }
    }
    if cur.is_some() {
        return Err(FormatError { line: text.lines().count(), message: "missing END".into() });
    }
    let mut it = classes.into_iter();
    let mut top = it.next().ok_or(FormatError { line: 0, message: "no CLASS block".into() })?;
    top.inners = it.collect();
    Ok(top)
}

fn parse_flags(s: &str) -> Result<Flags, String> {
    let mut f = Flags::default();
    if s == "-" {
        return Ok(f);
    }
    for n in s.split(',') {
        match n {
            "public" => f.public = true,
            "private" => f.private = true,
            "static" => f.is_static = true,
            "final" => f.is_final = true,
            "synthetic" => f.synthetic = true,
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    Ok(f)
}

fn unescape(s: &str) -> Result<String, String> {
    let inner = s
        .strip_prefix('"')
        .and_then(|x| x.strip_suffix('"'))
        .ok_or_else(|| format!("expected quoted string, found `{s}`"))?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                _ => return Err("bad escape".into()),
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn parse_types(s: &str) -> Vec<Type> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(',').map(parse_type).collect()
    }
}

/// Splits `owner.name(T1,T2)` into its parts.
fn parse_method_key(s: &str) -> Result<(String, String, Vec<Type>), String> {
    let open = s.find('(').ok_or("expected `(` in method reference")?;
    let close = s.rfind(')').ok_or("expected `)` in method reference")?;
    let head = &s[..open];
    let (owner, name) = head.rsplit_once('.').ok_or("expected owner.name")?;
    Ok((owner.to_string(), name.to_string(), parse_types(&s[open + 1..close])))
}

fn parse_pool_line(l: &str) -> Result<(usize, Const), String> {
    let mut parts = l.splitn(3, ' ');
    let idx: usize = parts.next().unwrap()[1..].parse().map_err(|_| "bad pool index")?;
    let kind = parts.next().ok_or("missing pool kind")?;
    let payload = parts.next().ok_or("missing pool payload")?;
    let c = match kind {
        "int" => Const::Int(payload.parse().map_err(|_| "bad int constant")?),
        "str" => Const::Str(unescape(payload)?),
        "class" => Const::Class(payload.to_string()),
        "field" => {
            let (owner, rest) = payload.split_once('#').ok_or("expected owner#name:type")?;
            let (name, ty) = rest.split_once(':').ok_or("expected owner#name:type")?;
            Const::Field(FieldRef { owner: owner.into(), name: name.into(), ty: parse_type(ty) })
        }
        "method" => {
            let (key, ret) = payload.rsplit_once(':').ok_or("expected method key:ret")?;
            let (owner, name, params) = parse_method_key(key)?;
            Const::Method(MethodRef { owner, name, params, ret: parse_type(ret) })
        }
        other => return Err(format!("unknown pool kind `{other}`")),
    };
    Ok((idx, c))
}

fn parse_field(s: &str) -> Result<FieldInfo, String> {
    let mut parts = s.splitn(4, ' ');
    let name = parts.next().ok_or("missing field name")?.to_string();
    let ty = parse_type(parts.next().ok_or("missing field type")?);
    let flags = parse_flags(parts.next().ok_or("missing field flags")?)?;
    let constant = match parts.next() {
        None => None,
        Some(c) => {
            let v = c.strip_prefix("const=").ok_or("expected const=")?;
            Some(match ty {
                Type::Int => ConstValue::Int(v.parse().map_err(|_| "bad int const")?),
                Type::Bool => ConstValue::Bool(v == "true"),
                _ => ConstValue::Str(unescape(v)?),
            })
        }
    };
    Ok(FieldInfo { name, ty, flags, constant })
}

fn parse_method_header(s: &str) -> Result<MethodInfo, String> {
    let close = s.rfind(')').ok_or("expected method signature")?;
    let (owner, name, params) = parse_method_key(&s[..=close])?;
    let mut m = MethodInfo {
        owner,
        name,
        params,
        param_names: Vec::new(),
        ret: Type::Void,
        flags: Flags::default(),
        max_stack: 0,
        max_locals: 0,
        code: Vec::new(),
        handlers: Vec::new(),
    };
    for attr in s[close + 1..].split_whitespace() {
        let (k, v) = attr.split_once('=').ok_or("expected key=value")?;
        match k {
            "returns" => m.ret = parse_type(v),
            "stack" => m.max_stack = v.parse().map_err(|_| "bad stack")?,
            "locals" => m.max_locals = v.parse().map_err(|_| "bad locals")?,
            "params" => m.param_names = if v == "-" { Vec::new() } else { v.split(',').map(str::to_string).collect() },
            "flags" => m.flags = parse_flags(v)?,
            other => return Err(format!("unknown method attribute `{other}`")),
        }
    }
    Ok(m)
}

fn parse_handler(s: &str) -> Result<HandlerEntry, String> {
    let p: Vec<&str> = s.split_whitespace().collect();
    if p.len() != 4 {
        return Err("expected HANDLER start end target Type".into());
    }
    let n = |x: &str| x.parse::<usize>().map_err(|_| "bad handler index".to_string());
    Ok(HandlerEntry {
        range: Handler { start: n(p[0])?, end: n(p[1])?, target: n(p[2])? },
        catch_type: p[3].to_string(),
    })
}

fn parse_insn(s: &str) -> Result<Insn, String> {
    let (m, arg) = match s.split_once(' ') {
        Some((m, a)) => (m, Some(a.trim())),
        None => (s, None),
    };
    let need = || arg.ok_or_else(|| format!("{m} needs an operand"));
    let pool = || -> Result<u32, String> {
        let a = need()?;
        a.strip_prefix('#').and_then(|x| x.parse().ok()).ok_or_else(|| format!("bad pool operand `{a}`"))
    };
    let num = || -> Result<usize, String> { need()?.parse().map_err(|_| format!("bad operand for {m}")) };
    let slot = || -> Result<u16, String> { need()?.parse().map_err(|_| format!("bad slot for {m}")) };
    let kind = |c: Option<char>| c.and_then(ValKind::from_letter).ok_or_else(|| format!("bad kind for {m}"));
    Ok(match m {
        "ICONST" => Insn::Iconst(need()?.parse().map_err(|_| "bad ICONST operand")?),
        "LDC" => Insn::Ldc(pool()?),
        "ACONST_NULL" => Insn::AconstNull,
        "ILOAD" => Insn::Iload(slot()?),
        "ISTORE" => Insn::Istore(slot()?),
        "ALOAD" => Insn::Aload(slot()?),
        "ASTORE" => Insn::Astore(slot()?),
        "GETSTATIC" => Insn::GetStatic(pool()?),
        "PUTSTATIC" => Insn::PutStatic(pool()?),
        "GETFIELD" => Insn::GetField(pool()?),
        "PUTFIELD" => Insn::PutField(pool()?),
        "ADD" => Insn::Add,
        "SUB" => Insn::Sub,
        "MUL" => Insn::Mul,
        "DIV" => Insn::Div,
        "REM" => Insn::Rem,
        "NEG" => Insn::Neg,
        "NOT" => Insn::Not,
        "CMPEQ" => Insn::CmpEq,
        "CMPNE" => Insn::CmpNe,
        "CMPLT" => Insn::CmpLt,
        "CMPLE" => Insn::CmpLe,
        "CMPGT" => Insn::CmpGt,
        "CMPGE" => Insn::CmpGe,
        "CONCAT" => {
            let mut cs = need()?.chars();
            Insn::Concat(kind(cs.next())?, kind(cs.next())?)
        }
        "BUILDER_NEW" => Insn::BuilderNew,
        "BUILDER_APPEND" => Insn::BuilderAppend(kind(need()?.chars().next())?),
        "BUILDER_STR" => Insn::BuilderStr,
        "IFEQ" => Insn::IfEq(num()?),
        "IFNE" => Insn::IfNe(num()?),
        "GOTO" => Insn::Goto(num()?),
        "INVOKESTATIC" => Insn::InvokeStatic(pool()?),
        "INVOKEVIRT" => Insn::InvokeVirt(pool()?),
        "INVOKESPECIAL" => Insn::InvokeSpecial(pool()?),
        "NEW" => Insn::New(pool()?),
        "DUP" => Insn::Dup,
        "POP" => Insn::Pop,
        "THROW" => Insn::Throw,
        "RETURN" => Insn::Return,
        "IRETURN" => Insn::IReturn,
        "ARETURN" => Insn::AReturn,
        "PRINT" => Insn::Print(kind(need()?.chars().next())?),
        other => return Err(format!("unknown instruction `{other}`")),
    })
}
