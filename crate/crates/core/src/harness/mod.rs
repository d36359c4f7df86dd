//! Corpus management and experiment orchestration.

pub mod config;
pub mod corpus;
pub mod experiment;
mod gen;
pub mod golden;
pub mod oracle;

#[cfg(test)]
mod tests;
