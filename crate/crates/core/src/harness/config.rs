//! Experiment configuration, read from TOML.
//!
//! ```toml
//! decompilers = ["literalist", "sugarer", "optimist", "mine"]
//! meta_order = ["literalist", "sugarer", "optimist"]
//! fuel = 200000
//! excluded_tests = ["golden.Foo/t1"]
//! stub_failed_bodies = false
//!
//! [[external]]
//! name = "mine"
//! command = "my-decompiler {input}"
//! timeout_secs = 30
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{external::DEFAULT_TIMEOUT_SECS, Builtin, DecompilerKind, DecompilerSpec};
use crate::vm::{TestCase, DEFAULT_FUEL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalAdapter {
    pub name: String,
    pub command: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Decompilers assessed on every class, by name.
    pub decompilers: Vec<String>,
    /// Decompilers handed to the meta-decompiler, in order.
    pub meta_order: Vec<String>,
    pub fuel: u64,
    pub external: Vec<ExternalAdapter>,
    /// `class/test-id` pairs left out of every suite.
    pub excluded_tests: Vec<String>,
    /// Built-in backends emit a throwing stub for bodies they cannot
    /// decompile instead of broken code.
    pub stub_failed_bodies: bool,
}

impl Default for Config {
    fn default() -> Self {
        let names: Vec<String> = Builtin::ALL.iter().map(|b| b.name().to_string()).collect();
        Config {
            decompilers: names.clone(),
            meta_order: names,
            fuel: DEFAULT_FUEL,
            external: Vec::new(),
            excluded_tests: Vec::new(),
            stub_failed_bodies: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("unknown decompiler `{0}`")]
    UnknownDecompiler(String),
    #[error("decompiler `{0}` is defined twice")]
    Duplicate(String),
    #[error("meta_order is empty")]
    EmptyMetaOrder,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        let cfg: Config = toml::from_str(&text).map_err(|source| ConfigError::Parse { path: p, source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, e) in self.external.iter().enumerate() {
            if Builtin::from_name(&e.name).is_some() || self.external[..i].iter().any(|x| x.name == e.name) {
                return Err(ConfigError::Duplicate(e.name.clone()));
            }
        }
        if self.meta_order.is_empty() {
            return Err(ConfigError::EmptyMetaOrder);
        }
        self.specs(&self.decompilers)?;
        self.specs(&self.meta_order)?;
        Ok(())
    }

    pub fn spec(&self, name: &str) -> Result<DecompilerSpec, ConfigError> {
        if let Some(b) = Builtin::from_name(name) {
            let mut spec = DecompilerSpec::builtin(b);
            spec.kind = DecompilerKind::Builtin { backend: b, stub_failed_bodies: self.stub_failed_bodies };
            return Ok(spec);
        }
        self.external
            .iter()
            .find(|e| e.name == name)
            .map(|e| DecompilerSpec::external(&e.name, &e.command, e.timeout_secs))
            .ok_or_else(|| ConfigError::UnknownDecompiler(name.to_string()))
    }

    pub fn specs(&self, names: &[String]) -> Result<Vec<DecompilerSpec>, ConfigError> {
        names.iter().map(|n| self.spec(n)).collect()
    }

    /// `tests` without the excluded ones for `class`.
    pub fn filter_tests(&self, class: &str, tests: &[TestCase]) -> Vec<TestCase> {
        tests.iter().filter(|t| !self.excluded_tests.contains(&format!("{class}/{}", t.id))).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_external_adapters() {
        let cfg: Config = toml::from_str(
            "decompilers = [\"literalist\", \"x\"]\nmeta_order = [\"x\", \"optimist\"]\nfuel = 10\n\n[[external]]\nname = \"x\"\ncommand = \"cat {input}\"\n",
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.external[0].timeout_secs, DEFAULT_TIMEOUT_SECS);
        assert_eq!(cfg.specs(&cfg.meta_order).unwrap()[0].name, "x");
        assert!(cfg.excluded_tests.is_empty());
    }

    #[test]
    fn rejects_unknown_names() {
        let cfg = Config { decompilers: vec!["nope".into()], ..Config::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::UnknownDecompiler(n)) if n == "nope"));
        let bad: Result<Config, _> = toml::from_str("fule = 3");
        assert!(bad.is_err());
    }
}
