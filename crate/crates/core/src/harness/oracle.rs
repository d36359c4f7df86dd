//! Expected outcomes derived from the backends' declared failure profiles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assess::Category;
use crate::decomp::shapes::{detect_all, FailureMode, Shape};
use crate::decomp::DecompilerSpec;
use crate::vm::BytecodeClass;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    Succeeds,
    /// The declared mode and the shape that triggers it.
    Fails(FailureMode, Shape),
}

impl Expected {
    /// Whether `c` is consistent with this expectation.
    pub fn admits(&self, c: Category) -> bool {
        match self {
            Expected::Succeeds => matches!(c, Category::StrictlyEquivalent | Category::EquivModuloInputs),
            Expected::Fails(FailureMode::EmptyOutput, _) => c == Category::EmptyOutput,
            Expected::Fails(FailureMode::SyntacticError, _) => c == Category::NotRecompilable,
            Expected::Fails(FailureMode::Deceptive, _) => c == Category::Deceptive,
        }
    }
}

fn rank(m: FailureMode) -> u8 {
    match m {
        FailureMode::EmptyOutput => 0,
        FailureMode::SyntacticError => 1,
        FailureMode::Deceptive => 2,
    }
}

/// The strongest declared failure among the shapes present in `bc`.
pub fn predict(bc: &BytecodeClass, spec: &DecompilerSpec) -> Expected {
    predict_from(&detect_all(bc).into_keys().collect::<Vec<_>>(), spec)
}

pub fn predict_from(shapes: &[Shape], spec: &DecompilerSpec) -> Expected {
    spec.failure_profile
        .iter()
        .filter(|p| shapes.contains(&p.shape))
        .min_by_key(|p| rank(p.mode))
        .map_or(Expected::Succeeds, |p| Expected::Fails(p.mode, p.shape))
}

/// Predictions for every decompiler, keyed by name.
pub fn predict_all(bc: &BytecodeClass, specs: &[DecompilerSpec]) -> BTreeMap<String, Expected> {
    let shapes: Vec<Shape> = detect_all(bc).into_keys().collect();
    specs.iter().map(|s| (s.name.clone(), predict_from(&shapes, s))).collect()
}
