//! Decompiler backends: three built-in ones and an adapter for external
//! executables.

mod body;
pub mod emit;
pub mod external;
pub mod ir;
pub mod lift;
pub mod rewrite;
pub mod shapes;
pub mod types;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::vm::BytecodeClass;
pub use emit::Style;
pub use shapes::{FailureMode, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Literalist,
    Sugarer,
    Optimist,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Literalist, Builtin::Sugarer, Builtin::Optimist];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Literalist => "literalist",
            Builtin::Sugarer => "sugarer",
            Builtin::Optimist => "optimist",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn style(self) -> Style {
        match self {
            Builtin::Literalist => Style::literalist(),
            Builtin::Sugarer => Style::sugarer(),
            Builtin::Optimist => Style::optimist(),
        }
    }

    /// Declared weaknesses.
    pub fn failure_profile(self) -> Vec<(Shape, FailureMode)> {
        match self {
            Builtin::Literalist => vec![
                (Shape::MultilineString, FailureMode::SyntacticError),
                (Shape::HandlerInLoop, FailureMode::EmptyOutput),
            ],
            Builtin::Sugarer => vec![
                (Shape::BoolLiteralLocal, FailureMode::SyntacticError),
                (Shape::VariantBWrapperCall, FailureMode::SyntacticError),
            ],
            Builtin::Optimist => vec![
                (Shape::StaticSetterShadow, FailureMode::Deceptive),
                (Shape::ForeignStaticCall, FailureMode::SyntacticError),
                (Shape::OverloadCastElision, FailureMode::Deceptive),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecompilerKind {
    Builtin {
        backend: Builtin,
        #[serde(default)]
        stub_failed_bodies: bool,
    },
    External {
        command: String,
        timeout_secs: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub shape: Shape,
    pub mode: FailureMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompilerSpec {
    pub name: String,
    pub kind: DecompilerKind,
    pub failure_profile: Vec<ProfileEntry>,
}

impl DecompilerSpec {
    pub fn builtin(b: Builtin) -> DecompilerSpec {
        DecompilerSpec {
            name: b.name().to_string(),
            kind: DecompilerKind::Builtin { backend: b, stub_failed_bodies: false },
            failure_profile: b
                .failure_profile()
                .into_iter()
                .map(|(shape, mode)| ProfileEntry { shape, mode })
                .collect(),
        }
    }

    pub fn external(name: &str, command: &str, timeout_secs: u64) -> DecompilerSpec {
        DecompilerSpec {
            name: name.to_string(),
            kind: DecompilerKind::External { command: command.to_string(), timeout_secs },
            failure_profile: Vec::new(),
        }
    }

    /// The three built-in backends in their default order.
    pub fn builtins() -> Vec<DecompilerSpec> {
        Builtin::ALL.into_iter().map(DecompilerSpec::builtin).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "text", rename_all = "lowercase")]
pub enum DecompStatus {
    Source(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompOutput {
    pub status: DecompStatus,
    pub elapsed_ms: u64,
}

impl DecompOutput {
    pub fn source(&self) -> Option<&str> {
        match &self.status {
            DecompStatus::Source(s) => Some(s),
            DecompStatus::Empty => None,
        }
    }
}

/// Built-in decompilation straight to text; `None` when the backend gives up.
pub fn decompile_builtin(b: Builtin, bc: &BytecodeClass, stub_failed_bodies: bool) -> Option<String> {
    let mut style = b.style();
    style.stub_failed_bodies = stub_failed_bodies;
    emit::emit_class(bc, &style).ok()
}

pub fn decompile(spec: &DecompilerSpec, bc: &BytecodeClass) -> DecompOutput {
    let start = Instant::now();
    let text = match &spec.kind {
        DecompilerKind::Builtin { backend, stub_failed_bodies } => decompile_builtin(*backend, bc, *stub_failed_bodies),
        DecompilerKind::External { command, timeout_secs } => external::run(command, bc, *timeout_secs),
    };
    let status = match text {
        Some(t) if !t.trim().is_empty() => DecompStatus::Source(t),
        _ => DecompStatus::Empty,
    };
    DecompOutput { status, elapsed_ms: start.elapsed().as_millis() as u64 }
}

#[cfg(test)]
mod tests;
