//! Summary tables over assessment records.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assess::{AssessmentRecord, Category};
use crate::compiler::Variant;
use crate::meta::MetaResult;

/// Decompiler name carried by the records of merged meta outputs.
pub const META: &str = "meta";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("no records")]
    Empty,
    #[error("missing grid cells: {}", .0.join(", "))]
    MissingCells(Vec<String>),
    #[error("duplicate records: {}", .0.join(", "))]
    Duplicate(Vec<String>),
}

/// `n/d` rounded half-up to three decimals; `n/a` when `d` is zero.
pub fn ratio(n: usize, d: usize) -> String {
    if d == 0 {
        return "n/a".to_string();
    }
    let (n, d) = (n as u128, d as u128);
    let t = (2000 * n + d) / (2 * d);
    format!("{}.{:03}", t / 1000, t % 1000)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub decompiler: String,
    pub total: usize,
    pub empty_output: usize,
    pub not_recompilable: usize,
    pub deceptive: usize,
    pub equiv_modulo_inputs: usize,
    pub strictly_equivalent: usize,
    pub recompilable: usize,
    pub recompilable_ratio: String,
    pub pass_tests: usize,
    pub pass_tests_ratio: String,
    /// deceptive / (deceptive + pass_tests)
    pub deceptive_rate: String,
}

impl SummaryRow {
    fn from_categories(name: &str, cats: impl IntoIterator<Item = Category>) -> SummaryRow {
        let mut counts = [0usize; 5];
        for c in cats {
            counts[c as usize] += 1;
        }
        SummaryRow::from_counts(name, counts)
    }

    fn from_counts(name: &str, c: [usize; 5]) -> SummaryRow {
        let total = c.iter().sum();
        let recompilable = c[2] + c[3] + c[4];
        let pass = c[3] + c[4];
        SummaryRow {
            decompiler: name.to_string(),
            total,
            empty_output: c[0],
            not_recompilable: c[1],
            deceptive: c[2],
            equiv_modulo_inputs: c[3],
            strictly_equivalent: c[4],
            recompilable,
            recompilable_ratio: ratio(recompilable, total),
            pass_tests: pass,
            pass_tests_ratio: ratio(pass, total),
            deceptive_rate: ratio(c[2], c[2] + pass),
        }
    }

    fn counts(&self) -> [usize; 5] {
        [self.empty_output, self.not_recompilable, self.deceptive, self.equiv_modulo_inputs, self.strictly_equivalent]
    }
}

/// Rows for one slice of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// One row per decompiler, the meta row included when present.
    pub rows: Vec<SummaryRow>,
    /// Per cell, the best category any single backend reached.
    pub union: SummaryRow,
    /// Column sums over the single backends.
    pub total: SummaryRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaComparison {
    pub meta_pass_tests: usize,
    pub best_single: String,
    pub best_single_pass_tests: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub classes: usize,
    pub compilers: Vec<Variant>,
    pub decompilers: Vec<String>,
    pub overall: Block,
    pub by_compiler: BTreeMap<Variant, Block>,
    pub meta: Option<MetaComparison>,
}

fn cell(class: &str, v: Variant) -> String {
    format!("{class}/{v}")
}

/// Checks the records cover `classes x compilers x decompilers` exactly once.
struct Grid<'a> {
    classes: BTreeSet<&'a str>,
    compilers: BTreeSet<Variant>,
    decompilers: BTreeSet<&'a str>,
    at: BTreeMap<(&'a str, Variant, &'a str), Category>,
}

impl<'a> Grid<'a> {
    fn new(records: &'a [AssessmentRecord]) -> Result<Grid<'a>, ReportError> {
        if records.is_empty() {
            return Err(ReportError::Empty);
        }
        let mut g = Grid {
            classes: BTreeSet::new(),
            compilers: BTreeSet::new(),
            decompilers: BTreeSet::new(),
            at: BTreeMap::new(),
        };
        let mut dups = Vec::new();
        for r in records {
            g.classes.insert(&r.class);
            g.compilers.insert(r.compiler);
            g.decompilers.insert(&r.decompiler);
            if g.at.insert((&r.class, r.compiler, &r.decompiler), r.category).is_some() {
                dups.push(format!("{}/{}", cell(&r.class, r.compiler), r.decompiler));
            }
        }
        if !dups.is_empty() {
            return Err(ReportError::Duplicate(dups));
        }
        let mut missing = Vec::new();
        for c in &g.classes {
            for v in &g.compilers {
                for d in &g.decompilers {
                    if !g.at.contains_key(&(*c, *v, *d)) {
                        missing.push(format!("{}/{d}", cell(c, *v)));
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(ReportError::MissingCells(missing));
        }
        Ok(g)
    }

    fn backends(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.decompilers.iter().copied().filter(|d| *d != META)
    }

    fn has_meta(&self) -> bool {
        self.decompilers.contains(META)
    }

    fn block(&self, compilers: &[Variant]) -> Block {
        let cats = |d: &str| -> Vec<Category> {
            let mut out = Vec::new();
            for c in &self.classes {
                for v in compilers {
                    out.push(self.at[&(*c, *v, d)]);
                }
            }
            out
        };
        let rows: Vec<SummaryRow> = self.decompilers.iter().map(|d| SummaryRow::from_categories(d, cats(d))).collect();
        let mut best = Vec::new();
        for c in &self.classes {
            for v in compilers {
                best.push(self.backends().map(|d| self.at[&(*c, *v, d)]).max().unwrap_or(Category::EmptyOutput));
            }
        }
        let union = SummaryRow::from_categories("union", best);
        let mut sums = [0usize; 5];
        for r in rows.iter().filter(|r| r.decompiler != META) {
            for (s, x) in sums.iter_mut().zip(r.counts()) {
                *s += x;
            }
        }
        Block { rows, union, total: SummaryRow::from_counts("total", sums) }
    }
}

pub fn summarize(records: &[AssessmentRecord]) -> Result<SummaryTable, ReportError> {
    let g = Grid::new(records)?;
    let all: Vec<Variant> = g.compilers.iter().copied().collect();
    let overall = g.block(&all);
    let by_compiler = all.iter().map(|&v| (v, g.block(&[v]))).collect();
    let meta = g.has_meta().then(|| {
        let best = overall
            .rows
            .iter()
            .filter(|r| r.decompiler != META)
            .max_by(|a, b| a.pass_tests.cmp(&b.pass_tests).then(b.decompiler.cmp(&a.decompiler)));
        let meta_row = overall.rows.iter().find(|r| r.decompiler == META).expect("meta row present");
        MetaComparison {
            meta_pass_tests: meta_row.pass_tests,
            best_single: best.map(|r| r.decompiler.clone()).unwrap_or_default(),
            best_single_pass_tests: best.map(|r| r.pass_tests).unwrap_or(0),
        }
    });
    Ok(SummaryTable {
        classes: g.classes.len(),
        compilers: all,
        decompilers: g.decompilers.iter().map(|d| d.to_string()).collect(),
        overall,
        by_compiler,
        meta,
    })
}

fn passes(c: Category) -> bool {
    matches!(c, Category::EquivModuloInputs | Category::StrictlyEquivalent)
}

/// Cells are `class/compiler`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Backends whose output passes the tests, per cell.
    pub successes: BTreeMap<String, BTreeSet<String>>,
    pub unique_success: BTreeMap<String, usize>,
    pub all_fail: BTreeSet<String>,
    pub all_success: BTreeSet<String>,
    /// All-fail cells the meta record passes; absent without meta records.
    pub meta_recovered: Option<BTreeSet<String>>,
}

pub fn overlap(records: &[AssessmentRecord]) -> Result<OverlapReport, ReportError> {
    let g = Grid::new(records)?;
    let backends: Vec<&str> = g.backends().collect();
    let mut successes = BTreeMap::new();
    let mut unique_success: BTreeMap<String, usize> = backends.iter().map(|d| (d.to_string(), 0)).collect();
    let mut all_fail = BTreeSet::new();
    let mut all_success = BTreeSet::new();
    let mut recovered = BTreeSet::new();
    for c in &g.classes {
        for v in &g.compilers {
            let key = cell(c, *v);
            let ok: BTreeSet<String> =
                backends.iter().filter(|d| passes(g.at[&(*c, *v, **d)])).map(|d| d.to_string()).collect();
            if ok.len() == 1 {
                *unique_success.get_mut(ok.iter().next().unwrap()).unwrap() += 1;
            }
            if ok.is_empty() {
                if g.has_meta() && passes(g.at[&(*c, *v, META)]) {
                    recovered.insert(key.clone());
                }
                all_fail.insert(key.clone());
            } else if ok.len() == backends.len() {
                all_success.insert(key.clone());
            }
            successes.insert(key, ok);
        }
    }
    Ok(OverlapReport {
        successes,
        unique_success,
        all_fail,
        all_success,
        meta_recovered: g.has_meta().then_some(recovered),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceStats {
    pub merged: usize,
    pub failed: usize,
    /// Number of merged classes by how many backends contributed.
    pub decompilers_used: BTreeMap<usize, usize>,
    /// Members contributed by each backend, over all merged classes.
    pub fragment_origins: BTreeMap<String, usize>,
    /// Number of merged classes by their set of contributing backends,
    /// written `a+b`.
    pub origin_sets: BTreeMap<String, usize>,
}

pub fn provenance_stats<'a>(results: impl IntoIterator<Item = &'a MetaResult>) -> ProvenanceStats {
    let mut s = ProvenanceStats::default();
    for r in results {
        if r.source().is_none() {
            s.failed += 1;
            continue;
        }
        s.merged += 1;
        *s.decompilers_used.entry(r.decompilers_used).or_default() += 1;
        for origin in r.provenance.values() {
            *s.fragment_origins.entry(origin.clone()).or_default() += 1;
        }
        let set: BTreeSet<&str> = r.provenance.values().map(String::as_str).collect();
        *s.origin_sets.entry(set.into_iter().collect::<Vec<_>>().join("+")).or_default() += 1;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub summary: SummaryTable,
    pub overlap: OverlapReport,
    pub provenance: Option<ProvenanceStats>,
}

pub fn build_report(records: &[AssessmentRecord], meta: Option<&[MetaResult]>) -> Result<Report, ReportError> {
    Ok(Report { summary: summarize(records)?, overlap: overlap(records)?, provenance: meta.map(provenance_stats) })
}

const CSV_HEADER: [&str; 13] = [
    "scope",
    "decompiler",
    "total",
    "empty_output",
    "not_recompilable",
    "deceptive",
    "equiv_modulo_inputs",
    "strictly_equivalent",
    "recompilable",
    "recompilable_ratio",
    "pass_tests",
    "pass_tests_ratio",
    "deceptive_rate",
];

/// The summary rows as CSV, one line per (scope, row).
pub fn summary_csv(t: &SummaryTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory writer");
    let mut put = |scope: &str, b: &Block| {
        for r in b.rows.iter().chain([&b.union, &b.total]) {
            let n = |x: usize| x.to_string();
            w.write_record([
                scope.to_string(),
                r.decompiler.clone(),
                n(r.total),
                n(r.empty_output),
                n(r.not_recompilable),
                n(r.deceptive),
                n(r.equiv_modulo_inputs),
                n(r.strictly_equivalent),
                n(r.recompilable),
                r.recompilable_ratio.clone(),
                n(r.pass_tests),
                r.pass_tests_ratio.clone(),
                r.deceptive_rate.clone(),
            ])
            .expect("in-memory writer");
        }
    };
    put("all", &t.overall);
    for (v, b) in &t.by_compiler {
        put(&v.to_string(), b);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests;
