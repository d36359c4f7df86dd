//! Exhaustive tree edit distance: minimum over every valid mapping.

use mdlab::astdiff::Tree;

struct Nodes {
    labels: Vec<String>,
    /// Pre-order index range `[i, end[i])` covers the subtree of `i`.
    end: Vec<usize>,
}

impl Nodes {
    fn new(t: &Tree) -> Nodes {
        let mut n = Nodes { labels: Vec::new(), end: Vec::new() };
        n.add(t);
        n
    }

    fn add(&mut self, t: &Tree) {
        let i = self.labels.len();
        self.labels.push(t.label.clone());
        self.end.push(0);
        for c in &t.children {
            self.add(c);
        }
        self.end[i] = self.labels.len();
    }

    fn anc(&self, a: usize, d: usize) -> bool {
        a < d && d < self.end[a]
    }
}

/// Unit-cost insert/delete/update distance by enumerating all mappings that
/// preserve ancestry and sibling order.
pub fn brute_force_distance(a: &Tree, b: &Tree) -> usize {
    let (na, nb) = (Nodes::new(a), Nodes::new(b));
    let mut best = usize::MAX;
    let mut pairs = Vec::new();
    search(&na, &nb, 0, &mut vec![false; nb.labels.len()], &mut pairs, &mut best);
    best
}

fn compatible(a: &Nodes, b: &Nodes, (i1, j1): (usize, usize), (i2, j2): (usize, usize)) -> bool {
    a.anc(i1, i2) == b.anc(j1, j2) && a.anc(i2, i1) == b.anc(j2, j1) && (i1 < i2) == (j1 < j2)
}

fn search(a: &Nodes, b: &Nodes, i: usize, used: &mut Vec<bool>, pairs: &mut Vec<(usize, usize)>, best: &mut usize) {
    if i == a.labels.len() {
        let mism = pairs.iter().filter(|&&(x, y)| a.labels[x] != b.labels[y]).count();
        let cost = a.labels.len() + b.labels.len() - 2 * pairs.len() + mism;
        *best = (*best).min(cost);
        return;
    }
    search(a, b, i + 1, used, pairs, best);
    for j in 0..b.labels.len() {
        if used[j] || !pairs.iter().all(|&p| compatible(a, b, p, (i, j))) {
            continue;
        }
        used[j] = true;
        pairs.push((i, j));
        search(a, b, i + 1, used, pairs, best);
        pairs.pop();
        used[j] = false;
    }
}
