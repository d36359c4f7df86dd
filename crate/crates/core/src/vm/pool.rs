use std::collections::BTreeMap;

use super::format::to_text;
use super::model::*;

/// Sorts (and deduplicates) the constant pool of every class by
/// `(kind, content)` and rewrites all pool operands accordingly.
pub fn canonicalize_pool(bc: &BytecodeClass) -> BytecodeClass {
    let mut out = canonicalize_one(bc);
    out.inners = bc.inners.iter().map(canonicalize_one).collect();
    out
}

fn canonicalize_one(bc: &BytecodeClass) -> BytecodeClass {
    let mut sorted: Vec<Const> = bc.pool.clone();
    sorted.sort();
    sorted.dedup();
    let pos: BTreeMap<&Const, u32> = sorted.iter().enumerate().map(|(i, c)| (c, i as u32)).collect();
    let remap: Vec<u32> = bc.pool.iter().map(|c| pos[c]).collect();
    let mut out = bc.clone();
    out.inners.clear();
    for m in &mut out.methods {
        for insn in &mut m.code {
            if let Some(k) = insn.pool_index() {
                if let Some(&nk) = remap.get(k as usize) {
                    *insn = insn.with_pool_index(nk);
                }
            }
        }
    }
    out.pool = sorted;
    out
}

/// Equal iff the canonical serializations coincide; otherwise returns a
/// line diff (`-` lines from `a`, `+` lines from `b`).
pub fn bytecode_equal(a: &BytecodeClass, b: &BytecodeClass) -> Result<(), String> {
    let ta = to_text(&canonicalize_pool(a));
    let tb = to_text(&canonicalize_pool(b));
    if ta == tb {
        Ok(())
    } else {
        Err(line_diff(&ta, &tb))
    }
}

/// Minimal line diff via longest common subsequence.
pub fn line_diff(a: &str, b: &str) -> String {
    let la: Vec<&str> = a.lines().collect();
    let lb: Vec<&str> = b.lines().collect();
    let (n, m) = (la.len(), lb.len());
    let mut lcs = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if la[i] == lb[j] { lcs[i + 1][j + 1] + 1 } else { lcs[i + 1][j].max(lcs[i][j + 1]) };
        }
    }
    let mut out = String::new();
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && la[i] == lb[j] {
            i += 1;
            j += 1;
        } else if j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j]) {
            out.push_str(&format!("+{}\n", lb[j]));
            j += 1;
        } else {
            out.push_str(&format!("-{}\n", la[i]));
            i += 1;
        }
    }
    out
}
