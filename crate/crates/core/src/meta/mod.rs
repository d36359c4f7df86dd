//! Meta-decompilation: merge the error-free members of several
//! decompilers' outputs into one recompilable class.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::{compile, compile_source, Variant};
use crate::decomp::{decompile, DecompilerSpec};
use crate::lang::*;
use crate::vm::BytecodeClass;

/// Error-free members keyed by signature. The first stored fragment for a
/// signature is never replaced.
#[derive(Debug, Clone, Default)]
pub struct FragmentStore {
    entries: BTreeMap<MemberSignature, TypeMember>,
}

impl FragmentStore {
    /// Stores `m` unless its signature is already present. Errored members
    /// are refused.
    pub fn offer(&mut self, sig: MemberSignature, m: &TypeMember) -> bool {
        if m.errored || self.entries.contains_key(&sig) {
            return false;
        }
        self.entries.insert(sig, m.clone());
        true
    }

    pub fn get(&self, sig: &MemberSignature) -> Option<&TypeMember> {
        self.entries.get(sig)
    }

    pub fn contains(&self, sig: &MemberSignature) -> bool {
        self.entries.contains_key(sig)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MemberSignature, &TypeMember)> {
        self.entries.iter()
    }
}

/// A decompiler's output with its errored members marked.
#[derive(Debug, Clone)]
pub struct DecompSolution {
    pub ast: ClassAst,
    pub base_decompiler: String,
    pub class_level_error: bool,
}

#[derive(Debug, Error)]
pub enum MetaError {
    #[error("no decompilers given")]
    EmptyOrder,
    #[error("annotating the output of {decompiler}: {source}")]
    Annotate { decompiler: String, source: AnnotateError },
}

/// Builds the annotated solution for one decompiler output. `None` when the
/// output cannot be parsed into a tree at all.
pub fn solution_from(text: &str, decompiler: &str, compiler: Variant) -> Result<Option<DecompSolution>, MetaError> {
    let parsed = parse_recovering(text);
    let Some(mut ast) = parsed.ast else { return Ok(None) };
    for m in &mut ast.members {
        m.origin = decompiler.to_string();
    }
    let mut diags = parsed.diagnostics;
    if let Err(d) = compile(&ast, compiler) {
        diags.extend(d);
    }
    let (ast, class_level) = annotate_errors(&ast, &diags)
        .map_err(|source| MetaError::Annotate { decompiler: decompiler.to_string(), source })?;
    Ok(Some(DecompSolution { ast, base_decompiler: decompiler.to_string(), class_level_error: class_level > 0 }))
}

pub fn completable(s: &DecompSolution, store: &FragmentStore) -> bool {
    !s.class_level_error
        && s.ast.members.iter().filter(|m| m.errored).all(|m| store.contains(&member_signature(m, &s.ast)))
}

/// Replaces every errored member with the stored fragment of the same
/// signature. Panics unless `completable(s, store)`.
pub fn complete(s: &DecompSolution, store: &FragmentStore) -> ClassAst {
    let mut out = s.ast.clone();
    for m in &mut out.members {
        if m.errored {
            let sig = member_signature(m, &s.ast);
            *m = store.get(&sig).unwrap_or_else(|| panic!("{sig} is not in the fragment store")).clone();
        }
    }
    out
}

/// Decides whether a completed class is accepted.
pub trait Oracle {
    fn accept(&self, source: &str, compiler: Variant) -> bool;
}

/// Accepts sources that parse and compile.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecompileOracle;

impl Oracle for RecompileOracle {
    fn accept(&self, source: &str, compiler: Variant) -> bool {
        compile_source(source, compiler).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "source", rename_all = "lowercase")]
pub enum MetaStatus {
    Success(String),
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaResult {
    #[serde(flatten)]
    pub status: MetaStatus,
    pub provenance: BTreeMap<MemberSignature, String>,
    pub decompilers_used: usize,
    /// Decompilers run, in order.
    pub invocations: Vec<String>,
    /// Base decompilers of completed solutions the oracle rejected.
    pub rejected: Vec<String>,
}

impl MetaResult {
    pub fn source(&self) -> Option<&str> {
        match &self.status {
            MetaStatus::Success(s) => Some(s),
            MetaStatus::Failure => None,
        }
    }
}

pub fn meta_decompile(
    bc: &BytecodeClass,
    order: &[DecompilerSpec],
    compiler: Variant,
) -> Result<MetaResult, MetaError> {
    meta_decompile_with(bc, order, compiler, &RecompileOracle)
}

pub fn meta_decompile_with(
    bc: &BytecodeClass,
    order: &[DecompilerSpec],
    compiler: Variant,
    oracle: &dyn Oracle,
) -> Result<MetaResult, MetaError> {
    if order.is_empty() {
        return Err(MetaError::EmptyOrder);
    }
    let mut store = FragmentStore::default();
    let mut solutions: Vec<DecompSolution> = Vec::new();
    let mut invocations = Vec::new();
    let mut rejected = Vec::new();
    for spec in order {
        invocations.push(spec.name.clone());
        let Some(text) = decompile(spec, bc).source().map(str::to_string) else { continue };
        let Some(sol) = solution_from(&text, &spec.name, compiler)? else { continue };
        for m in &sol.ast.members {
            store.offer(member_signature(m, &sol.ast), m);
        }
        solutions.push(sol);
        let mut i = 0;
        while i < solutions.len() {
            if !completable(&solutions[i], &store) {
                i += 1;
                continue;
            }
            let done = complete(&solutions[i], &store);
            let source = pretty_print(&done);
            if oracle.accept(&source, compiler) {
                let provenance: BTreeMap<MemberSignature, String> =
                    done.members.iter().map(|m| (member_signature(m, &done), m.origin.clone())).collect();
                let decompilers_used = provenance.values().collect::<BTreeSet<_>>().len();
                return Ok(MetaResult {
                    status: MetaStatus::Success(source),
                    provenance,
                    decompilers_used,
                    invocations,
                    rejected,
                });
            }
            rejected.push(solutions.remove(i).base_decompiler);
        }
    }
    Ok(MetaResult {
        status: MetaStatus::Failure,
        provenance: BTreeMap::new(),
        decompilers_used: 0,
        invocations,
        rejected,
    })
}

#[cfg(test)]
mod tests;
