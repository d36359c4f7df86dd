//! Structural distance between an original class and a decompiled one.

mod normalize;
mod script;
mod tree;
mod zss;

use serde::{Deserialize, Serialize};

pub use normalize::normalize_names;
pub use script::{diff_trees, Edit, EditCounts, EditScript};
pub use tree::{class_tree, Tree};

use crate::lang::{parse, ClassAst};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub edits: usize,
    pub original_nodes: usize,
    pub normalized: f64,
}

impl Distortion {
    pub fn from_script(s: &EditScript, original_nodes: usize) -> Distortion {
        Distortion { edits: s.cost(), original_nodes, normalized: s.cost() as f64 / original_nodes as f64 }
    }
}

/// Edit script between two classes after name normalization.
pub fn edit_script(original: &ClassAst, decompiled: &ClassAst) -> (Tree, Tree, EditScript) {
    let a = class_tree(&normalize_names(original));
    let b = class_tree(&normalize_names(decompiled));
    let s = diff_trees(&a, &b);
    (a, b, s)
}

pub fn distortion(original: &ClassAst, decompiled: &ClassAst) -> Distortion {
    let (a, _, s) = edit_script(original, decompiled);
    Distortion::from_script(&s, a.size())
}

/// `None` when either side does not parse.
pub fn distortion_of_sources(original: &str, decompiled: &str) -> Option<Distortion> {
    Some(distortion(&parse(original).ok()?, &parse(decompiled).ok()?))
}

#[cfg(test)]
mod tests;
