//! Decompiler lab for MiniJ, a small Java-like language.

pub mod assess;
pub mod astdiff;
pub mod compiler;
pub mod decomp;
pub mod harness;
pub mod lang;
pub mod meta;
pub mod report;
pub mod vm;
