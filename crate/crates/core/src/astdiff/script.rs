//! Edit scripts: construction from a tree mapping, move collapse, replay.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::tree::Tree;
use super::zss::{solve, Flat};

/// Node ids: source nodes are numbered by post-order index; nodes created
/// by `Insert` get `source_len + target post-order index`. A `parent` of
/// `None` is the (virtual) position above the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    Update {
        node: usize,
        from: String,
        to: String,
    },
    /// Removes the node; its children take its place in the parent.
    Delete {
        node: usize,
        label: String,
    },
    /// Detaches the source subtree rooted at `node` and attaches it under
    /// `parent` at `position`.
    Move {
        node: usize,
        label: String,
        parent: Option<usize>,
        position: usize,
    },
    /// Creates a node under `parent` at `position`, adopting the `adopt`
    /// children that follow it.
    Insert {
        node: usize,
        label: String,
        parent: Option<usize>,
        position: usize,
        adopt: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub source_len: usize,
    pub edits: Vec<Edit>,
    /// Cost of the optimal insert/delete/update script before moves are
    /// collapsed.
    pub base_cost: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub inserts: usize,
    pub deletes: usize,
    pub updates: usize,
    pub moves: usize,
}

impl EditScript {
    pub fn cost(&self) -> usize {
        self.edits.len()
    }

    pub fn counts(&self) -> EditCounts {
        let mut c = EditCounts::default();
        for e in &self.edits {
            match e {
                Edit::Insert { .. } => c.inserts += 1,
                Edit::Delete { .. } => c.deletes += 1,
                Edit::Update { .. } => c.updates += 1,
                Edit::Move { .. } => c.moves += 1,
            }
        }
        c
    }

    /// Applies the script to `source`. Moved subtrees are detached before
    /// any other edit runs.
    pub fn apply(&self, source: &Tree) -> Result<Tree, String> {
        Work::new(source).run(self)
    }
}

/// Minimal insert/delete/update script, with delete+insert pairs of
/// identical subtrees collapsed into moves.
pub fn diff_trees(a: &Tree, b: &Tree) -> EditScript {
    let fa = Flat::new(a);
    let fb = Flat::new(b);
    let sol = solve(&fa, &fb);
    let mut a2b: Vec<Option<usize>> = vec![None; fa.len()];
    let mut b2a: Vec<Option<usize>> = vec![None; fb.len()];
    for &(i, j) in &sol.pairs {
        a2b[i] = Some(j);
        b2a[j] = Some(i);
    }

    // Maximal unmapped subtrees on each side, paired when identical.
    let dead_a = unmapped_roots(&fa, &a2b);
    let new_b = unmapped_roots(&fb, &b2a);
    let mut moved_b: BTreeMap<usize, usize> = BTreeMap::new();
    let mut moved_a = vec![false; fa.len()];
    for &x in &dead_a {
        if let Some(&y) = new_b.iter().find(|&&y| !moved_b.contains_key(&y) && fa.nodes[x] == fb.nodes[y]) {
            moved_b.insert(y, x);
            moved_a[fa.lml[x]..=x].fill(true);
        }
    }
    let mut in_moved_b = vec![false; fb.len()];
    for &y in moved_b.keys() {
        in_moved_b[fb.lml[y]..=y].fill(true);
    }

    let mut edits = Vec::new();
    for &(i, j) in &sol.pairs {
        let (from, to) = (&fa.nodes[i].label, &fb.nodes[j].label);
        if from != to {
            edits.push(Edit::Update { node: i, from: from.clone(), to: to.clone() });
        }
    }
    for i in 0..fa.len() {
        if a2b[i].is_none() && !moved_a[i] {
            edits.push(Edit::Delete { node: i, label: fa.nodes[i].label.clone() });
        }
    }

    // Target ids of b nodes once they exist in the working tree.
    let n = fa.len();
    let mut id_of: Vec<usize> = vec![usize::MAX; fb.len()];
    for (&y, &x) in &moved_b {
        for k in 0..=(y - fb.lml[y]) {
            id_of[fb.lml[y] + k] = fa.lml[x] + k;
        }
    }
    for j in preorder(&fb) {
        if let Some(i) = b2a[j] {
            id_of[j] = i;
            continue;
        }
        if in_moved_b[j] && !moved_b.contains_key(&j) {
            continue;
        }
        let parent = fb.parent[j].map(|p| id_of[p]);
        let position = match fb.parent[j] {
            Some(p) => fb.kids[p].iter().position(|&k| k == j).unwrap(),
            None => 0,
        };
        let label = fb.nodes[j].label.clone();
        if let Some(&x) = moved_b.get(&j) {
            edits.push(Edit::Move { node: x, label, parent, position });
        } else {
            id_of[j] = n + j;
            let adopt = top_mapped(&fb, &b2a, j);
            edits.push(Edit::Insert { node: n + j, label, parent, position, adopt });
        }
    }
    EditScript { source_len: n, edits, base_cost: sol.cost }
}

fn unmapped_roots(f: &Flat<'_>, map: &[Option<usize>]) -> Vec<usize> {
    let whole: Vec<bool> = (0..f.len()).map(|i| (f.lml[i]..=i).all(|k| map[k].is_none())).collect();
    let mut roots: Vec<usize> = (0..f.len()).filter(|&i| whole[i] && f.parent[i].is_none_or(|p| !whole[p])).collect();
    // Pre-order for deterministic pairing.
    let order = preorder(f);
    let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    roots.sort_by_key(|i| rank[i]);
    roots
}

fn preorder(f: &Flat<'_>) -> Vec<usize> {
    let mut out = Vec::with_capacity(f.len());
    let mut stack = vec![f.root()];
    while let Some(i) = stack.pop() {
        out.push(i);
        stack.extend(f.kids[i].iter().rev());
    }
    out
}

/// Number of mapped descendants of `j` with no mapped node between them
/// and `j`.
fn top_mapped(f: &Flat<'_>, map: &[Option<usize>], j: usize) -> usize {
    f.kids[j].iter().map(|&k| if map[k].is_some() { 1 } else { top_mapped(f, map, k) }).sum()
}

const ROOT: usize = usize::MAX;

/// Mutable arena used for replay.
struct Work {
    label: HashMap<usize, String>,
    kids: HashMap<usize, Vec<usize>>,
    parent: HashMap<usize, usize>,
}

impl Work {
    fn new(t: &Tree) -> Work {
        let mut w = Work { label: HashMap::new(), kids: HashMap::new(), parent: HashMap::new() };
        let mut next = 0;
        let root = w.load(t, &mut next);
        w.kids.insert(ROOT, vec![root]);
        w.parent.insert(root, ROOT);
        w
    }

    fn load(&mut self, t: &Tree, next: &mut usize) -> usize {
        let kids: Vec<usize> = t.children.iter().map(|c| self.load(c, next)).collect();
        let id = *next;
        *next += 1;
        for &k in &kids {
            self.parent.insert(k, id);
        }
        self.label.insert(id, t.label.clone());
        self.kids.insert(id, kids);
        id
    }

    fn detach(&mut self, id: usize) -> Result<usize, String> {
        let p = self.parent.remove(&id).ok_or_else(|| format!("node {id} is not attached"))?;
        let siblings = self.kids.get_mut(&p).unwrap();
        let pos = siblings.iter().position(|&k| k == id).unwrap();
        siblings.remove(pos);
        Ok(pos)
    }

    fn children_of(&mut self, parent: Option<usize>, position: usize) -> Result<&mut Vec<usize>, String> {
        let p = parent.unwrap_or(ROOT);
        let kids = self.kids.get_mut(&p).ok_or_else(|| format!("no node {p}"))?;
        if position > kids.len() {
            return Err(format!("position {position} out of range under {p}"));
        }
        Ok(kids)
    }

    fn run(mut self, s: &EditScript) -> Result<Tree, String> {
        for e in &s.edits {
            if let Edit::Move { node, .. } = e {
                self.detach(*node)?;
            }
        }
        for e in &s.edits {
            match e {
                Edit::Update { node, to, .. } => {
                    *self.label.get_mut(node).ok_or_else(|| format!("no node {node}"))? = to.clone();
                }
                Edit::Delete { node, .. } => {
                    let p = self.parent[node];
                    let pos = self.detach(*node)?;
                    let orphans = self.kids.remove(node).unwrap_or_default();
                    for &o in &orphans {
                        self.parent.insert(o, p);
                    }
                    self.kids.get_mut(&p).unwrap().splice(pos..pos, orphans);
                    self.label.remove(node);
                }
                Edit::Move { node, parent, position, .. } => {
                    self.children_of(*parent, *position)?.insert(*position, *node);
                    self.parent.insert(*node, parent.unwrap_or(ROOT));
                }
                Edit::Insert { node, label, parent, position, adopt } => {
                    let kids = self.children_of(*parent, *position)?;
                    if position + adopt > kids.len() {
                        return Err(format!("cannot adopt {adopt} children at {position}"));
                    }
                    let adopted: Vec<usize> = kids.splice(*position..position + adopt, [*node]).collect();
                    for &k in &adopted {
                        self.parent.insert(k, *node);
                    }
                    self.parent.insert(*node, parent.unwrap_or(ROOT));
                    self.kids.insert(*node, adopted);
                    self.label.insert(*node, label.clone());
                }
            }
        }
        match self.kids[&ROOT].as_slice() {
            [r] => Ok(self.build(*r)),
            other => Err(format!("replay left {} roots", other.len())),
        }
    }

    fn build(&self, id: usize) -> Tree {
        Tree::node(self.label[&id].clone(), self.kids[&id].iter().map(|&k| self.build(k)).collect())
    }
}
