//! Fuel-bounded interpreter.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use super::model::*;
use super::pool::line_diff;
use super::prelude::{prelude, EXCEPTION};
use super::testcase::{Arg, Outcome, TestCase, TestReport, Verdict};
use crate::lang::Type;

pub const DEFAULT_FUEL: u64 = 10_000_000;
/// Extra fuel charged for every method invocation.
pub const CALL_COST: u64 = 16;

#[derive(Debug, Clone)]
enum Value {
    Int(i32),
    Str(Rc<str>),
    Obj(u32),
    Builder(u32),
    Null,
}

enum HeapObj {
    Inst { class: u32, fields: Vec<Value> },
    Builder(String),
}

#[derive(Debug, Clone)]
enum R {
    Iconst(i32),
    Const(Value),
    Load(u16),
    Store(u16),
    GetStatic(usize),
    PutStatic(usize),
    GetField(usize),
    PutField(usize),
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Neg,
    Not,
    Cmp(Insn),
    Concat(ValKind, ValKind),
    BNew,
    BAppend(ValKind),
    BStr,
    IfEq(usize),
    IfNe(usize),
    Goto(usize),
    Call { method: u32, nargs: usize },
    CallVirt { desc: u32, nargs: usize },
    New(u32),
    Dup,
    Pop,
    Throw,
    Ret,
    RetVal,
    Print(ValKind),
    Link(Rc<str>),
}

struct RHandler {
    start: usize,
    end: usize,
    target: usize,
    catch: Option<u32>,
}

struct RMethod {
    key: String,
    is_static: bool,
    nparams: usize,
    max_locals: usize,
    ret: Type,
    code: Vec<R>,
    handlers: Vec<RHandler>,
}

struct RClass {
    name: String,
    sup: Option<u32>,
    template: Vec<Value>,
    vtable: HashMap<u32, u32>,
    clinit: Option<u32>,
    const_statics: Vec<(usize, Value)>,
}

/// Linked, immutable program: library classes plus the classes under test.
pub struct Program {
    classes: Vec<RClass>,
    class_ids: HashMap<String, u32>,
    methods: Vec<RMethod>,
    static_defaults: Vec<Value>,
    /// Classes whose static initialization runs at startup, in order.
    init_order: Vec<u32>,
}

/// Raw result of running an entry point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Completed(Outcome),
    Timeout,
    Crash(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub stdout: String,
    pub status: RunStatus,
    pub fuel_used: u64,
}

enum Stop {
    Timeout,
    Crash(String),
    Uncaught(u32),
}

fn default_value(ty: &Type) -> Value {
    match ty {
        Type::Int | Type::Bool => Value::Int(0),
        _ => Value::Null,
    }
}

impl Program {
    /// Links `classes` (top-level classes together with their nested
    /// classes) against the library.
    pub fn load(classes: &[&BytecodeClass]) -> Program {
        let mut all: Vec<&BytecodeClass> = prelude().iter().collect();
        let user_start = all.len();
        for c in classes {
            all.extend(c.all_classes());
        }
        let mut class_ids = HashMap::new();
        for (i, c) in all.iter().enumerate() {
            class_ids.entry(c.name.clone()).or_insert(i as u32);
        }
        // Superclass links; unknown superclasses degrade to Object.
        let sup: Vec<Option<u32>> = all
            .iter()
            .map(|c| if c.superclass.is_empty() { None } else { Some(*class_ids.get(&c.superclass).unwrap_or(&0)) })
            .collect();
        // Field layouts (inherited slots first) in dependency order.
        type Layout = (HashMap<String, usize>, Vec<Value>);
        let mut layout: Vec<Option<Layout>> = vec![None; all.len()];
        fn build_layout(
            i: usize,
            all: &[&BytecodeClass],
            sup: &[Option<u32>],
            layout: &mut Vec<Option<Layout>>,
            depth: usize,
        ) {
            if layout[i].is_some() {
                return;
            }
            let (mut map, mut template) = (HashMap::new(), Vec::new());
            if let Some(s) = sup[i] {
                if depth < all.len() && s as usize != i {
                    build_layout(s as usize, all, sup, layout, depth + 1);
                    (map, template) = layout[s as usize].clone().unwrap();
                }
            }
            for f in all[i].fields.iter().filter(|f| !f.flags.is_static) {
                map.insert(f.name.clone(), template.len());
                template.push(default_value(&f.ty));
            }
            layout[i] = Some((map, template));
        }
        for i in 0..all.len() {
            build_layout(i, &all, &sup, &mut layout, 0);
        }
        let (layout, templates): (Vec<HashMap<String, usize>>, Vec<Vec<Value>>) =
            layout.into_iter().map(Option::unwrap).unzip();
        let mut static_slots: HashMap<(u32, String), usize> = HashMap::new();
        let mut static_defaults = Vec::new();
        let mut const_statics: Vec<Vec<(usize, Value)>> = vec![Vec::new(); all.len()];
        for (i, c) in all.iter().enumerate() {
            for f in c.fields.iter().filter(|f| f.flags.is_static) {
                let slot = static_defaults.len();
                static_defaults.push(default_value(&f.ty));
                static_slots.insert((i as u32, f.name.clone()), slot);
                if let Some(v) = &f.constant {
                    let v = match v {
                        ConstValue::Int(n) => Value::Int(*n),
                        ConstValue::Bool(b) => Value::Int(i32::from(*b)),
                        ConstValue::Str(s) => Value::Str(Rc::from(s.as_str())),
                    };
                    const_statics[i].push((slot, v));
                }
            }
        }
        // Method table.
        let mut method_ids: HashMap<(u32, String), u32> = HashMap::new();
        let mut count = 0u32;
        for (i, c) in all.iter().enumerate() {
            for m in &c.methods {
                method_ids.entry((i as u32, format!("{}({})", m.name, join_types(&m.params)))).or_insert(count);
                count += 1;
            }
        }
        let mut descs: HashMap<String, u32> = HashMap::new();
        let mut intern_desc = |d: String| {
            let n = descs.len() as u32;
            *descs.entry(d).or_insert(n)
        };
        // Walks the superclass chain from `c` looking for `key`.
        let lookup = |mut c: u32, key: &str, map: &HashMap<(u32, String), u32>| -> Option<u32> {
            for _ in 0..=all.len() {
                if let Some(&m) = map.get(&(c, key.to_string())) {
                    return Some(m);
                }
                c = sup[c as usize]?;
            }
            None
        };
        let find_static = |mut c: u32, name: &str| -> Option<usize> {
            for _ in 0..=all.len() {
                if let Some(&s) = static_slots.get(&(c, name.to_string())) {
                    return Some(s);
                }
                c = sup[c as usize]?;
            }
            None
        };
        let mut methods = Vec::new();
        let mut clinit = vec![None; all.len()];
        for (ci, c) in all.iter().enumerate() {
            for m in &c.methods {
                let id = methods.len() as u32;
                if m.is_clinit() {
                    clinit[ci] = Some(id);
                }
                let code = m
                    .code
                    .iter()
                    .map(|insn| {
                        link_insn(insn, c, &class_ids, &layout, &method_ids, &lookup, &find_static, &mut intern_desc)
                    })
                    .collect();
                let handlers = m
                    .handlers
                    .iter()
                    .map(|h| RHandler {
                        start: h.range.start,
                        end: h.range.end,
                        target: h.range.target,
                        catch: class_ids.get(&h.catch_type).copied(),
                    })
                    .collect();
                methods.push(RMethod {
                    key: m.key(),
                    is_static: m.flags.is_static,
                    nparams: m.params.len(),
                    max_locals: (m.max_locals as usize).max(m.arg_slots()),
                    ret: m.ret.clone(),
                    code,
                    handlers,
                });
            }
        }
        // Virtual tables: inherited entries first, then own overrides.
        let mut vtables: Vec<Option<HashMap<u32, u32>>> = vec![None; all.len()];
        fn build_vtable(
            i: usize,
            all: &[&BytecodeClass],
            sup: &[Option<u32>],
            vt: &mut Vec<Option<HashMap<u32, u32>>>,
            method_ids: &HashMap<(u32, String), u32>,
            descs: &mut dyn FnMut(String) -> u32,
            depth: usize,
        ) {
            if vt[i].is_some() {
                return;
            }
            let mut t = HashMap::new();
            if let Some(s) = sup[i] {
                if depth < all.len() && s as usize != i {
                    build_vtable(s as usize, all, sup, vt, method_ids, descs, depth + 1);
                    t = vt[s as usize].clone().unwrap();
                }
            }
            for m in all[i].methods.iter().filter(|m| !m.flags.is_static && !m.is_ctor()) {
                let d = format!("{}({})", m.name, join_types(&m.params));
                let id = method_ids[&(i as u32, d.clone())];
                t.insert(descs(d), id);
            }
            vt[i] = Some(t);
        }
        for i in 0..all.len() {
            build_vtable(i, &all, &sup, &mut vtables, &method_ids, &mut intern_desc, 0);
        }
        let classes = all
            .iter()
            .enumerate()
            .map(|(i, c)| RClass {
                name: c.name.clone(),
                sup: sup[i],
                template: templates[i].clone(),
                vtable: vtables[i].take().unwrap(),
                clinit: clinit[i],
                const_statics: std::mem::take(&mut const_statics[i]),
            })
            .collect();
        Program {
            classes,
            class_ids,
            methods,
            static_defaults,
            init_order: (0..all.len() as u32)
                .filter(|&i| i as usize >= user_start || clinit[i as usize].is_some())
                .collect(),
        }
    }

    fn method_id(&self, key: &str) -> Option<u32> {
        self.methods.iter().position(|m| m.key == key).map(|i| i as u32)
    }

    /// Runs the static method `entry` (`owner.name(T..)`) after initializing
    /// all classes. The rendered return value of a non-void entry is
    /// appended to stdout as one line.
    pub fn run(&self, entry: &str, args: &[Arg], fuel: u64) -> Observation {
        let mut m = Machine {
            prog: self,
            heap: Vec::new(),
            statics: self.static_defaults.clone(),
            out: String::new(),
            fuel,
            used: 0,
        };
        let status = m.run_entry(entry, args);
        Observation { stdout: m.out, status, fuel_used: m.used }
    }
}

/// `(class id, descriptor)` to method id.
type MethodIds = HashMap<(u32, String), u32>;

#[allow(clippy::too_many_arguments)]
fn link_insn(
    insn: &Insn,
    c: &BytecodeClass,
    class_ids: &HashMap<String, u32>,
    layout: &[HashMap<String, usize>],
    method_ids: &MethodIds,
    lookup: &dyn Fn(u32, &str, &MethodIds) -> Option<u32>,
    find_static: &dyn Fn(u32, &str) -> Option<usize>,
    intern_desc: &mut dyn FnMut(String) -> u32,
) -> R {
    let link = |msg: String| R::Link(Rc::from(msg));
    let field = |k: u32| -> Result<(u32, &FieldRef), R> {
        let f = c.field_ref(k).ok_or_else(|| link(format!("bad field operand #{k}")))?;
        let owner = *class_ids.get(&f.owner).ok_or_else(|| link(format!("NoClassDefFoundError: {}", f.owner)))?;
        Ok((owner, f))
    };
    let instance_slot = |k: u32| -> R {
        match field(k) {
            Err(e) => e,
            Ok((owner, f)) => match layout[owner as usize].get(&f.name) {
                Some(&s) => R::GetField(s),
                None => link(format!("NoSuchFieldError: {}#{}", f.owner, f.name)),
            },
        }
    };
    match *insn {
        Insn::Iconst(n) => R::Iconst(n),
        Insn::Ldc(k) => match c.pool.get(k as usize) {
            Some(Const::Int(n)) => R::Iconst(*n),
            Some(Const::Str(s)) => R::Const(Value::Str(Rc::from(s.as_str()))),
            _ => link(format!("bad LDC operand #{k}")),
        },
        Insn::AconstNull => R::Const(Value::Null),
        Insn::Iload(s) | Insn::Aload(s) => R::Load(s),
        Insn::Istore(s) | Insn::Astore(s) => R::Store(s),
        Insn::GetStatic(k) | Insn::PutStatic(k) => match field(k) {
            Err(e) => e,
            Ok((owner, f)) => match find_static(owner, &f.name) {
                Some(s) if matches!(insn, Insn::GetStatic(_)) => R::GetStatic(s),
                Some(s) => R::PutStatic(s),
                None => link(format!("NoSuchFieldError: {}#{}", f.owner, f.name)),
            },
        },
        Insn::GetField(k) => instance_slot(k),
        Insn::PutField(k) => match instance_slot(k) {
            R::GetField(s) => R::PutField(s),
            other => other,
        },
        Insn::Add => R::Add,
        Insn::Sub => R::Sub,
        Insn::Mul => R::Mul,
        Insn::Div => R::Div,
        Insn::Rem => R::Rem,
        Insn::Neg => R::Neg,
        Insn::Not => R::Not,
        Insn::CmpEq | Insn::CmpNe | Insn::CmpLt | Insn::CmpLe | Insn::CmpGt | Insn::CmpGe => R::Cmp(*insn),
        Insn::Concat(a, b) => R::Concat(a, b),
        Insn::BuilderNew => R::BNew,
        Insn::BuilderAppend(k) => R::BAppend(k),
        Insn::BuilderStr => R::BStr,
        Insn::IfEq(t) => R::IfEq(t),
        Insn::IfNe(t) => R::IfNe(t),
        Insn::Goto(t) => R::Goto(t),
        Insn::InvokeStatic(k) | Insn::InvokeSpecial(k) | Insn::InvokeVirt(k) => {
            let Some(m) = c.method_ref(k) else { return link(format!("bad method operand #{k}")) };
            let nargs = m.params.len() + usize::from(!matches!(insn, Insn::InvokeStatic(_)));
            if let Insn::InvokeVirt(_) = insn {
                return R::CallVirt { desc: intern_desc(m.descriptor()), nargs };
            }
            let Some(&owner) = class_ids.get(&m.owner) else {
                return link(format!("NoClassDefFoundError: {}", m.owner));
            };
            match lookup(owner, &m.descriptor(), method_ids) {
                Some(id) => R::Call { method: id, nargs },
                None => link(format!("NoSuchMethodError: {}", m.key())),
            }
        }
        Insn::New(k) => match c.class_ref(k).and_then(|n| class_ids.get(n)) {
            Some(&id) => R::New(id),
            None => link(format!("NoClassDefFoundError: {}", c.class_ref(k).unwrap_or("?"))),
        },
        Insn::Dup => R::Dup,
        Insn::Pop => R::Pop,
        Insn::Throw => R::Throw,
        Insn::Return => R::Ret,
        Insn::IReturn | Insn::AReturn => R::RetVal,
        Insn::Print(k) => R::Print(k),
    }
}

struct Frame {
    method: u32,
    pc: usize,
    locals: Vec<Value>,
    stack: Vec<Value>,
}

struct Machine<'p> {
    prog: &'p Program,
    heap: Vec<HeapObj>,
    statics: Vec<Value>,
    out: String,
    fuel: u64,
    used: u64,
}

impl<'p> Machine<'p> {
    fn run_entry(&mut self, entry: &str, args: &[Arg]) -> RunStatus {
        for &c in &self.prog.init_order {
            let cls = &self.prog.classes[c as usize];
            for (slot, v) in &cls.const_statics {
                self.statics[*slot] = v.clone();
            }
            if let Some(m) = cls.clinit {
                match self.invoke(m, Vec::new()) {
                    Ok(_) => {}
                    Err(stop) => return self.stop_status(stop),
                }
            }
        }
        let Some(mid) = self.prog.method_id(entry) else {
            return RunStatus::Crash(format!("NoSuchMethodError: {entry}"));
        };
        let m = &self.prog.methods[mid as usize];
        if !m.is_static || m.nparams != args.len() {
            return RunStatus::Crash(format!("entry {entry} is not a static method taking {} arguments", args.len()));
        }
        let ret = m.ret.clone();
        let argv = args
            .iter()
            .map(|a| match a {
                Arg::Int(n) => Value::Int(*n),
                Arg::Bool(b) => Value::Int(i32::from(*b)),
                Arg::Str(s) => Value::Str(Rc::from(s.as_str())),
                Arg::Null => Value::Null,
            })
            .collect();
        match self.invoke(mid, argv) {
            Ok(v) => {
                if let Some(v) = v {
                    let text = self.render(&v, ValKind::of(&ret));
                    self.out.push_str(&text);
                    self.out.push('\n');
                }
                RunStatus::Completed(Outcome::Normal)
            }
            Err(stop) => self.stop_status(stop),
        }
    }

    fn stop_status(&self, stop: Stop) -> RunStatus {
        match stop {
            Stop::Timeout => RunStatus::Timeout,
            Stop::Crash(m) => RunStatus::Crash(m),
            Stop::Uncaught(o) => match &self.heap[o as usize] {
                HeapObj::Inst { class, .. } => {
                    RunStatus::Completed(Outcome::Throws(self.prog.classes[*class as usize].name.clone()))
                }
                HeapObj::Builder(_) => RunStatus::Crash("thrown value is not an object".into()),
            },
        }
    }

    fn render(&self, v: &Value, kind: ValKind) -> String {
        match (v, kind) {
            (Value::Int(n), ValKind::Z) => (*n != 0).to_string(),
            (Value::Int(n), _) => n.to_string(),
            (Value::Str(s), _) => s.to_string(),
            (Value::Null, _) => "null".to_string(),
            (Value::Builder(b), _) => match &self.heap[*b as usize] {
                HeapObj::Builder(s) => s.clone(),
                HeapObj::Inst { .. } => String::new(),
            },
            (Value::Obj(o), _) => match &self.heap[*o as usize] {
                HeapObj::Inst { class, .. } => format!("{}@{}", self.prog.classes[*class as usize].name, o),
                HeapObj::Builder(s) => s.clone(),
            },
        }
    }

    fn is_subclass(&self, mut c: u32, of: u32) -> bool {
        for _ in 0..=self.prog.classes.len() {
            if c == of {
                return true;
            }
            match self.prog.classes[c as usize].sup {
                Some(s) => c = s,
                None => return false,
            }
        }
        false
    }

    fn alloc(&mut self, class: u32) -> u32 {
        let fields = self.prog.classes[class as usize].template.clone();
        self.heap.push(HeapObj::Inst { class, fields });
        (self.heap.len() - 1) as u32
    }

    /// Allocates a library exception with the given message.
    fn make_exception(&mut self, name: &str, msg: &str) -> Result<u32, Stop> {
        let cid = *self.prog.class_ids.get(name).ok_or_else(|| Stop::Crash(format!("missing library class {name}")))?;
        let o = self.alloc(cid);
        let exc = self.prog.class_ids[EXCEPTION];
        if self.is_subclass(cid, exc) {
            if let HeapObj::Inst { fields, .. } = &mut self.heap[o as usize] {
                if let Some(f) = fields.first_mut() {
                    *f = Value::Str(Rc::from(msg));
                }
            }
        }
        Ok(o)
    }

    fn charge(&mut self, n: u64) -> Result<(), Stop> {
        self.used += n;
        if self.used > self.fuel {
            Err(Stop::Timeout)
        } else {
            Ok(())
        }
    }

    fn new_frame(&self, method: u32, args: Vec<Value>) -> Frame {
        let m = &self.prog.methods[method as usize];
        let mut locals = args;
        locals.resize(m.max_locals.max(locals.len()), Value::Null);
        Frame { method, pc: 0, locals, stack: Vec::new() }
    }

    /// Runs `method` to completion with an explicit frame stack.
    fn invoke(&mut self, method: u32, args: Vec<Value>) -> Result<Option<Value>, Stop> {
        self.charge(CALL_COST)?;
        let mut frames = vec![self.new_frame(method, args)];
        loop {
            let step = self.step(&mut frames);
            match step {
                Ok(Some(ret)) => return Ok(ret),
                Ok(None) => {}
                Err(Thrown::Stop(s)) => return Err(s),
                Err(Thrown::Exc(o)) => {
                    if !self.unwind(&mut frames, o) {
                        return Err(Stop::Uncaught(o));
                    }
                }
            }
        }
    }

    /// Transfers control to the innermost matching handler; false if the
    /// exception escapes every frame.
    fn unwind(&mut self, frames: &mut Vec<Frame>, exc: u32) -> bool {
        let class = match &self.heap[exc as usize] {
            HeapObj::Inst { class, .. } => *class,
            HeapObj::Builder(_) => return false,
        };
        while let Some(f) = frames.last_mut() {
            let at = f.pc.saturating_sub(1);
            let m = &self.prog.methods[f.method as usize];
            let target = m
                .handlers
                .iter()
                .find(|h| h.start <= at && at < h.end && h.catch.is_some_and(|c| self.is_subclass(class, c)));
            if let Some(h) = target {
                f.stack.clear();
                f.stack.push(Value::Obj(exc));
                f.pc = h.target;
                return true;
            }
            frames.pop();
        }
        false
    }

    /// Executes one instruction. `Ok(Some(v))` when the outermost frame
    /// returned.
    fn step(&mut self, frames: &mut Vec<Frame>) -> Result<Option<Option<Value>>, Thrown> {
        self.charge(1).map_err(Thrown::Stop)?;
        let prog = self.prog;
        let f = frames.last_mut().unwrap();
        let m = &prog.methods[f.method as usize];
        let Some(insn) = m.code.get(f.pc) else {
            return Err(crash("control fell off the end of the method"));
        };
        f.pc += 1;
        macro_rules! pop {
            () => {
                f.stack.pop().ok_or_else(|| crash("operand stack underflow"))?
            };
        }
        macro_rules! pop_int {
            () => {
                match pop!() {
                    Value::Int(n) => n,
                    other => return Err(crash(&format!("expected int operand, found {other:?}"))),
                }
            };
        }
        match insn {
            R::Iconst(n) => f.stack.push(Value::Int(*n)),
            R::Const(v) => f.stack.push(v.clone()),
            R::Load(s) => {
                let v = f.locals.get(*s as usize).cloned().ok_or_else(|| crash("bad local slot"))?;
                f.stack.push(v);
            }
            R::Store(s) => {
                let v = pop!();
                let slot = f.locals.get_mut(*s as usize).ok_or_else(|| crash("bad local slot"))?;
                *slot = v;
            }
            R::GetStatic(s) => f.stack.push(self.statics[*s].clone()),
            R::PutStatic(s) => {
                let v = pop!();
                self.statics[*s] = v;
            }
            R::GetField(slot) => {
                let o = pop!();
                let Value::Obj(o) = o else {
                    return self.throw_builtin(frames, "NullPointerException", "field read on null");
                };
                let v = match &self.heap[o as usize] {
                    HeapObj::Inst { fields, .. } => {
                        fields.get(*slot).cloned().ok_or_else(|| crash("bad field slot"))?
                    }
                    HeapObj::Builder(_) => return Err(crash("field read on builder")),
                };
                frames.last_mut().unwrap().stack.push(v);
            }
            R::PutField(slot) => {
                let v = pop!();
                let o = pop!();
                let Value::Obj(o) = o else {
                    return self.throw_builtin(frames, "NullPointerException", "field write on null");
                };
                match &mut self.heap[o as usize] {
                    HeapObj::Inst { fields, .. } => {
                        *fields.get_mut(*slot).ok_or_else(|| crash("bad field slot"))? = v;
                    }
                    HeapObj::Builder(_) => return Err(crash("field write on builder")),
                }
            }
            R::Add | R::Sub | R::Mul | R::Div | R::Rem => {
                let b = pop_int!();
                let a = pop_int!();
                let r = match insn {
                    R::Add => a.wrapping_add(b),
                    R::Sub => a.wrapping_sub(b),
                    R::Mul => a.wrapping_mul(b),
                    _ if b == 0 => return self.throw_builtin(frames, "ArithmeticException", "/ by zero"),
                    R::Div => a.wrapping_div(b),
                    _ => a.wrapping_rem(b),
                };
                f.stack.push(Value::Int(r));
            }
            R::Neg => {
                let a = pop_int!();
                f.stack.push(Value::Int(a.wrapping_neg()));
            }
            R::Not => {
                let a = pop_int!();
                f.stack.push(Value::Int(i32::from(a == 0)));
            }
            R::Cmp(op) => {
                let b = pop!();
                let a = pop!();
                let r = match op {
                    Insn::CmpEq | Insn::CmpNe => {
                        let eq = match (&a, &b) {
                            (Value::Int(x), Value::Int(y)) => x == y,
                            (Value::Str(x), Value::Str(y)) => x == y,
                            (Value::Null, Value::Null) => true,
                            (Value::Obj(x), Value::Obj(y)) | (Value::Builder(x), Value::Builder(y)) => x == y,
                            _ => false,
                        };
                        if *op == Insn::CmpEq {
                            eq
                        } else {
                            !eq
                        }
                    }
                    _ => {
                        let (Value::Int(x), Value::Int(y)) = (&a, &b) else {
                            return Err(crash("ordered comparison of non-ints"));
                        };
                        match op {
                            Insn::CmpLt => x < y,
                            Insn::CmpLe => x <= y,
                            Insn::CmpGt => x > y,
                            _ => x >= y,
                        }
                    }
                };
                f.stack.push(Value::Int(i32::from(r)));
            }
            R::Concat(ka, kb) => {
                let b = pop!();
                let a = pop!();
                let s = format!("{}{}", self.render(&a, *ka), self.render(&b, *kb));
                frames.last_mut().unwrap().stack.push(Value::Str(Rc::from(s)));
            }
            R::BNew => {
                self.heap.push(HeapObj::Builder(String::new()));
                let id = (self.heap.len() - 1) as u32;
                f.stack.push(Value::Builder(id));
            }
            R::BAppend(k) => {
                let v = pop!();
                let b = pop!();
                let Value::Builder(id) = b else {
                    return self.throw_builtin(frames, "NullPointerException", "append on null");
                };
                let text = self.render(&v, *k);
                if let HeapObj::Builder(s) = &mut self.heap[id as usize] {
                    s.push_str(&text);
                }
                frames.last_mut().unwrap().stack.push(Value::Builder(id));
            }
            R::BStr => {
                let b = pop!();
                let Value::Builder(id) = b else {
                    return self.throw_builtin(frames, "NullPointerException", "toString on null");
                };
                let s = match &self.heap[id as usize] {
                    HeapObj::Builder(s) => s.clone(),
                    HeapObj::Inst { .. } => return Err(crash("not a builder")),
                };
                frames.last_mut().unwrap().stack.push(Value::Str(Rc::from(s)));
            }
            R::IfEq(t) => {
                if pop_int!() == 0 {
                    f.pc = *t;
                }
            }
            R::IfNe(t) => {
                if pop_int!() != 0 {
                    f.pc = *t;
                }
            }
            R::Goto(t) => f.pc = *t,
            R::Call { method, nargs } => {
                let (method, nargs) = (*method, *nargs);
                if f.stack.len() < nargs {
                    return Err(crash("operand stack underflow"));
                }
                let args = f.stack.split_off(f.stack.len() - nargs);
                let callee = &prog.methods[method as usize];
                if !callee.is_static && matches!(args[0], Value::Null) {
                    return self.throw_builtin(frames, "NullPointerException", "call on null");
                }
                self.charge(CALL_COST).map_err(Thrown::Stop)?;
                let nf = self.new_frame(method, args);
                frames.push(nf);
            }
            R::CallVirt { desc, nargs } => {
                let (desc, nargs) = (*desc, *nargs);
                if f.stack.len() < nargs {
                    return Err(crash("operand stack underflow"));
                }
                let args = f.stack.split_off(f.stack.len() - nargs);
                let class = match &args[0] {
                    Value::Obj(o) => match &self.heap[*o as usize] {
                        HeapObj::Inst { class, .. } => *class,
                        HeapObj::Builder(_) => return Err(crash("virtual call on builder")),
                    },
                    Value::Null => return self.throw_builtin(frames, "NullPointerException", "call on null"),
                    other => return Err(crash(&format!("virtual call on {other:?}"))),
                };
                let Some(&method) = prog.classes[class as usize].vtable.get(&desc) else {
                    return Err(crash("AbstractMethodError: no implementation for virtual call"));
                };
                self.charge(CALL_COST).map_err(Thrown::Stop)?;
                let nf = self.new_frame(method, args);
                frames.push(nf);
            }
            R::New(c) => {
                let c = *c;
                let o = self.alloc(c);
                frames.last_mut().unwrap().stack.push(Value::Obj(o));
            }
            R::Dup => {
                let v = f.stack.last().cloned().ok_or_else(|| crash("operand stack underflow"))?;
                f.stack.push(v);
            }
            R::Pop => {
                pop!();
            }
            R::Throw => {
                let v = pop!();
                return match v {
                    Value::Obj(o) => Err(Thrown::Exc(o)),
                    Value::Null => self.throw_builtin(frames, "NullPointerException", "throw null"),
                    _ => Err(crash("thrown value is not an object")),
                };
            }
            R::Ret | R::RetVal => {
                let v = if matches!(insn, R::RetVal) { Some(pop!()) } else { None };
                frames.pop();
                match frames.last_mut() {
                    None => return Ok(Some(v)),
                    Some(caller) => {
                        if let Some(v) = v {
                            caller.stack.push(v);
                        }
                    }
                }
            }
            R::Print(k) => {
                let v = pop!();
                let text = self.render(&v, *k);
                self.out.push_str(&text);
                self.out.push('\n');
            }
            R::Link(msg) => return Err(crash(msg)),
        }
        Ok(None)
    }

    fn throw_builtin(&mut self, _frames: &mut [Frame], name: &str, msg: &str) -> Result<Option<Option<Value>>, Thrown> {
        let o = self.make_exception(name, msg).map_err(Thrown::Stop)?;
        Err(Thrown::Exc(o))
    }
}

enum Thrown {
    Stop(Stop),
    Exc(u32),
}

fn crash(msg: &str) -> Thrown {
    Thrown::Stop(Stop::Crash(msg.to_string()))
}

/// Runs one test against `bc` (and its nested classes).
pub fn execute(bc: &BytecodeClass, test: &TestCase, fuel: u64) -> Verdict {
    let prog = Program::load(&[bc]);
    verdict_for(&prog, test, fuel)
}

fn verdict_for(prog: &Program, test: &TestCase, fuel: u64) -> Verdict {
    let obs = prog.run(&test.entry, &test.args, fuel);
    match obs.status {
        RunStatus::Timeout => Verdict::Timeout,
        RunStatus::Crash(m) => Verdict::Crash(m),
        RunStatus::Completed(outcome) => {
            if outcome == test.expected_outcome && obs.stdout == test.expected_stdout {
                Verdict::Pass
            } else {
                let mut diff = String::new();
                if outcome != test.expected_outcome {
                    diff.push_str(&format!("-outcome {}\n+outcome {}\n", test.expected_outcome, outcome));
                }
                if obs.stdout != test.expected_stdout {
                    diff.push_str(&line_diff(&test.expected_stdout, &obs.stdout));
                }
                Verdict::Fail(diff)
            }
        }
    }
}

pub fn run_suite(bc: &BytecodeClass, tests: &[TestCase], fuel: u64) -> TestReport {
    let start = Instant::now();
    let prog = Program::load(&[bc]);
    let verdicts = tests.iter().map(|t| (t.id.clone(), verdict_for(&prog, t, fuel))).collect();
    TestReport { verdicts, elapsed_ms: start.elapsed().as_millis() as u64 }
}
