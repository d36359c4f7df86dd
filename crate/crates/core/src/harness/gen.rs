//! Seeded templates for engineered and filler classes.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::corpus::{Draft, Role};
use crate::vm::testcase::Arg;

const STEMS: &[&str] = &[
    "Abacus", "Bramble", "Cinder", "Dynamo", "Ember", "Fjord", "Gadget", "Harbor", "Iris", "Jigsaw", "Kestrel",
    "Lantern", "Meadow", "Nimbus", "Orchid", "Pylon", "Quartz", "Ripple", "Sprocket", "Tundra", "Umber", "Vortex",
    "Willow", "Zephyr",
];

const VERBS: &[&str] = &["mix", "fold", "scale", "shift", "blend", "tally", "spin", "weigh", "trim", "pack"];

fn class_name(rng: &mut ChaCha8Rng, role: Role, k: usize) -> String {
    let prefix = match role {
        Role::Straight => "line",
        Role::Concat => "text",
        Role::Wrapper => "wrap",
        Role::Disjoint => "split",
        Role::SameMember => "knot",
        _ => "misc",
    };
    format!("gen.{}{}{:02}", STEMS.choose(rng).unwrap(), capitalize(prefix), k)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn simple(name: &str) -> &str {
    name.rsplit('.').next().unwrap()
}

fn int_args(rng: &mut ChaCha8Rng, arity: usize, n: usize) -> Vec<Vec<Arg>> {
    (0..n).map(|_| (0..arity).map(|_| Arg::Int(rng.gen_range(-6..=12))).collect()).collect()
}

pub(super) fn draft(rng: &mut ChaCha8Rng, role: Role, k: usize) -> Draft {
    let name = class_name(rng, role, k);
    let (source, entry, args) = match role {
        Role::Straight => straight(rng, &name),
        Role::Concat => concat(rng, &name),
        Role::Wrapper => wrapper(rng, &name),
        Role::Disjoint => disjoint(rng, &name),
        Role::SameMember => same_member(rng, &name),
        _ => filler(rng, &name),
    };
    Draft { name, source, entry, args, role, tags: None, labels: None }
}

/// Random arithmetic over `vars`, at most `depth` operators deep.
fn arith(rng: &mut ChaCha8Rng, vars: &[String], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return if vars.is_empty() || rng.gen_bool(0.25) {
            rng.gen_range(1..=9).to_string()
        } else {
            vars.choose(rng).unwrap().clone()
        };
    }
    let l = arith(rng, vars, depth - 1);
    let grouped = if l.contains(' ') { format!("({l})") } else { l.clone() };
    match rng.gen_range(0..4) {
        0 => format!("{l} + {}", arith(rng, vars, depth - 1)),
        1 => format!("{l} - {}", arith(rng, vars, 0)),
        2 => format!("{grouped} * {}", arith(rng, vars, 0)),
        _ => format!("{grouped} % {}", rng.gen_range(2..=7)),
    }
}

fn straight(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let short = simple(name);
    let mut s = format!("class {name} {{\n");
    let konst = rng.gen_range(2..=20);
    let negative = rng.gen_bool(0.5);
    writeln!(s, "    static final int K = {};", if negative { -konst } else { konst }).unwrap();
    writeln!(s, "    static int seen;").unwrap();
    let instance = rng.gen_bool(0.6);
    if instance {
        writeln!(s, "    int w;\n\n    {short}(int w) {{\n        this.w = w;\n    }}\n").unwrap();
        writeln!(s, "    int {}(int a) {{\n        return w * a + seen;\n    }}\n", VERBS[0]).unwrap();
    }
    let n_methods = rng.gen_range(1..=3);
    for m in 0..n_methods {
        let verb = VERBS[1 + m];
        writeln!(s, "    static int {verb}(int a, int b) {{").unwrap();
        let mut vars = vec!["a".to_string(), "b".to_string(), "K".to_string()];
        for j in 0..rng.gen_range(1..=3) {
            let v = format!("x{j}");
            writeln!(s, "        int {v} = {};", arith(rng, &vars, 2)).unwrap();
            vars.push(v);
        }
        if m > 0 && rng.gen_bool(0.5) {
            writeln!(s, "        seen = seen + {}(b, a);", VERBS[m]).unwrap();
        }
        writeln!(s, "        return {};\n    }}\n", arith(rng, &vars, 2)).unwrap();
    }
    writeln!(s, "    static void check(int a, int b) {{").unwrap();
    for m in 0..n_methods {
        writeln!(s, "        print({}(a, b));", VERBS[1 + m]).unwrap();
    }
    if instance {
        writeln!(s, "        {short} o = new {short}(a);\n        print(o.{}(b));", VERBS[0]).unwrap();
    }
    writeln!(s, "        print(seen);\n    }}\n}}").unwrap();
    let args = int_args(rng, 2, 3);
    (s, format!("{name}.check(int,int)"), args)
}

fn concat(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let open = ["<", "[", "(", "{"].choose(rng).unwrap();
    let sep = [":", "=", "/", "-"].choose(rng).unwrap();
    let mut s = format!("class {name} {{\n");
    writeln!(s, "    static str label(str p, int n) {{\n        str s = \"{open}\" + p + \"{sep}\" + n;\n        return s;\n    }}\n").unwrap();
    if rng.gen_bool(0.5) {
        writeln!(s, "    static str twice(str a, bool f) {{\n        return a + f + a;\n    }}\n").unwrap();
    } else {
        writeln!(
            s,
            "    static str twice(str a, bool f) {{\n        str t = a + a;\n        return t + \"!\" + f;\n    }}\n"
        )
        .unwrap();
    }
    let k = rng.gen_range(1..=5);
    writeln!(s, "    static void check(str p, int n) {{\n        print(label(p, n));\n        print(twice(label(p, n + {k}), n > {k}));\n    }}\n}}").unwrap();
    let words = ["ox", "elm", "sky", "", "tide"];
    let args = (0..3)
        .map(|i| {
            let p = if i == 2 { Arg::Null } else { Arg::Str(words.choose(rng).unwrap().to_string()) };
            vec![p, Arg::Int(rng.gen_range(-3..=9))]
        })
        .collect();
    (s, format!("{name}.check(str,int)"), args)
}

fn wrapper(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let inner = ["Node", "Slot", "Box", "Pair"].choose(rng).unwrap();
    let two = rng.gen_bool(0.5);
    let (params, body, ctor_args, get) = if two {
        ("int a, int b", "this.a = a;\n            this.b = b;", "x, x + 2", "a * b")
    } else {
        ("int a", "this.a = a;", "x - 1", "a + a")
    };
    let mut s = format!("class {name} {{\n    static class {inner} {{\n        private int a;\n");
    if two {
        s.push_str("        private int b;\n");
    }
    writeln!(s, "\n        private {inner}({params}) {{\n            {body}\n        }}\n\n        int get() {{\n            return {get};\n        }}\n    }}\n").unwrap();
    writeln!(s, "    static int build(int x) {{\n        {inner} n = new {inner}({ctor_args});\n        return n.get();\n    }}\n").unwrap();
    writeln!(s, "    static void check(int x) {{\n        print(build(x));\n    }}\n}}").unwrap();
    let args = int_args(rng, 1, 3);
    (s, format!("{name}.check(int)"), args)
}

/// A member only the literalist mishandles.
fn literalist_breaker(rng: &mut ChaCha8Rng, s: &mut String) -> &'static str {
    let words = ["north", "alpha", "left", "first"];
    let w = words.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        writeln!(s, "    static void banner() {{\n        print(\"{w}\\n{w}\");\n    }}\n").unwrap();
        "banner();"
    } else {
        writeln!(s, "    static final str BANNER = \"{w}\\n\";\n").unwrap();
        writeln!(s, "    static int banner() {{\n        return 1;\n    }}\n").unwrap();
        "print(banner());"
    }
}

/// A member only the sugarer mishandles.
fn sugarer_breaker(rng: &mut ChaCha8Rng, s: &mut String) -> &'static str {
    let k = rng.gen_range(0..=4);
    let (init, set) = if rng.gen_bool(0.5) { ("false", "true") } else { ("true", "false") };
    writeln!(
        s,
        "    static int flag(int a) {{\n        bool on = {init};\n        if (a > {k}) {{\n            on = {set};\n        }}\n        if (on) {{\n            return a;\n        }}\n        return {k};\n    }}\n"
    )
    .unwrap();
    "print(flag(a));"
}

/// A member only the optimist mishandles, plus the helper it calls.
fn optimist_breaker(rng: &mut ChaCha8Rng, s: &mut String) -> &'static str {
    let m = rng.gen_range(2..=5);
    writeln!(s, "    static class Util {{\n        static int times(int x) {{\n            return x * {m};\n        }}\n    }}\n").unwrap();
    writeln!(s, "    static int scaled(int a) {{\n        return Util.times(a) - 1;\n    }}\n").unwrap();
    "print(scaled(a));"
}

fn clean_member(rng: &mut ChaCha8Rng, s: &mut String, i: usize) -> String {
    let verb = VERBS[i % VERBS.len()];
    let body = arith(rng, &["a".to_string()], 2);
    writeln!(s, "    static int {verb}(int a) {{\n        return {body};\n    }}\n").unwrap();
    format!("print({verb}(a));")
}

fn check(s: &mut String, calls: &[String]) {
    s.push_str("    static void check(int a) {\n");
    for c in calls {
        writeln!(s, "        {c}").unwrap();
    }
    s.push_str("    }\n}\n");
}

fn disjoint(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let mut s = format!("class {name} {{\n");
    let mut calls = Vec::new();
    let mut parts: Vec<u8> = vec![0, 1, 2];
    parts.shuffle(rng);
    for p in parts {
        calls.push(
            match p {
                0 => literalist_breaker(rng, &mut s),
                1 => sugarer_breaker(rng, &mut s),
                _ => optimist_breaker(rng, &mut s),
            }
            .to_string(),
        );
    }
    for i in 0..rng.gen_range(0..=2) {
        calls.push(clean_member(rng, &mut s, i));
    }
    check(&mut s, &calls);
    (s, format!("{name}.check(int)"), int_args(rng, 1, 3))
}

fn same_member(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let m = rng.gen_range(2..=4);
    let k = rng.gen_range(0..=5);
    let mut s = format!(
        "class {name} {{\n    static class Aux {{\n        static int base(int x) {{\n            return x + {m};\n        }}\n    }}\n\n"
    );
    writeln!(
        s,
        "    static int knot(int a) {{\n        print(\"in\\nout\");\n        bool hit = false;\n        if (a > Aux.base({k})) {{\n            hit = true;\n        }}\n        if (hit) {{\n            return 1;\n        }}\n        return 0;\n    }}\n"
    )
    .unwrap();
    let mut calls = vec!["print(knot(a));".to_string()];
    for i in 0..rng.gen_range(1..=2) {
        calls.push(clean_member(rng, &mut s, i));
    }
    check(&mut s, &calls);
    (s, format!("{name}.check(int)"), int_args(rng, 1, 3))
}

/// Structured code with branches and bounded loops.
struct Filler<'r> {
    rng: &'r mut ChaCha8Rng,
    out: String,
    vars: Vec<String>,
    /// Loop counters that must not be assigned.
    frozen: Vec<String>,
    next: usize,
}

impl Filler<'_> {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth + 2 {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn cond(&mut self) -> String {
        let a = arith(self.rng, &self.vars, 1);
        let op = ["<", "<=", ">", ">=", "==", "!="].choose(self.rng).unwrap();
        format!("{a} {op} {}", self.rng.gen_range(-2..=6))
    }

    fn assignable(&mut self) -> Option<String> {
        let v: Vec<String> = self.vars.iter().filter(|v| !self.frozen.contains(v) && *v != "K").cloned().collect();
        v.choose(self.rng).cloned()
    }

    fn block(&mut self, depth: usize, n: usize) {
        let scope = self.vars.len();
        for _ in 0..n {
            self.stmt(depth);
        }
        self.vars.truncate(scope);
    }

    fn stmt(&mut self, depth: usize) {
        let choice = if depth >= 2 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..7) };
        match choice {
            0 => {
                let v = format!("t{}", self.next);
                self.next += 1;
                let e = arith(self.rng, &self.vars, 2);
                self.line(depth, &format!("int {v} = {e};"));
                self.vars.push(v);
            }
            1 => {
                if let Some(v) = self.assignable() {
                    let e = arith(self.rng, &self.vars, 2);
                    self.line(depth, &format!("{v} = {e};"));
                }
            }
            2 => {
                let e = arith(self.rng, &self.vars, 1);
                self.line(depth, &format!("print({e});"));
            }
            3 | 4 => {
                let c = self.cond();
                self.line(depth, &format!("if ({c}) {{"));
                self.block(depth + 1, 2);
                if choice == 4 {
                    self.line(depth, "} else {");
                    self.block(depth + 1, 2);
                }
                self.line(depth, "}");
            }
            5 => {
                let i = format!("i{}", self.next);
                self.next += 1;
                let bound = self.rng.gen_range(2..=5);
                self.line(depth, &format!("int {i} = 0;"));
                self.line(depth, &format!("while ({i} < {bound}) {{"));
                self.vars.push(i.clone());
                self.frozen.push(i.clone());
                self.block(depth + 1, 2);
                self.line(depth + 1, &format!("{i} = {i} + 1;"));
                self.line(depth, "}");
            }
            _ => {
                if let Some(v) = self.assignable() {
                    let d = self.rng.gen_range(2..=4);
                    let e = arith(self.rng, &self.vars, 1);
                    self.line(depth, "try {");
                    self.line(depth + 1, &format!("{v} = {v} / ({e} % {d});"));
                    self.line(depth, "} catch (RuntimeException e) {");
                    self.line(depth + 1, &format!("{v} = -1;"));
                    self.line(depth, "}");
                }
            }
        }
    }
}

fn filler(rng: &mut ChaCha8Rng, name: &str) -> (String, String, Vec<Vec<Arg>>) {
    let mut s = format!("class {name} {{\n    static final int K = {};\n\n", rng.gen_range(1..=9));
    let n = rng.gen_range(1..=3);
    for m in 0..n {
        let mut f = Filler {
            rng,
            out: String::new(),
            vars: vec!["a".into(), "b".into(), "K".into()],
            frozen: Vec::new(),
            next: 0,
        };
        f.block(0, 4);
        let body = f.out;
        let ret = arith(rng, &["a".to_string(), "b".to_string()], 1);
        let call = if m > 0 && rng.gen_bool(0.5) { format!(" + {}(b, a)", VERBS[m - 1]) } else { String::new() };
        writeln!(s, "    static int {}(int a, int b) {{\n{body}        return {ret}{call};\n    }}\n", VERBS[m])
            .unwrap();
    }
    s.push_str("    static void check(int a, int b) {\n");
    for verb in &VERBS[..n] {
        writeln!(s, "        print({verb}(a, b));").unwrap();
    }
    s.push_str("    }\n}\n");
    let args = int_args(rng, 2, 4);
    (s, format!("{name}.check(int,int)"), args)
}
