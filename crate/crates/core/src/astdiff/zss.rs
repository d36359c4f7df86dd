//! Zhang–Shasha ordered tree edit distance with unit costs.

use super::tree::Tree;

/// Post-order flattening of a tree.
pub(super) struct Flat<'t> {
    pub nodes: Vec<&'t Tree>,
    /// Leftmost leaf descendant of each node.
    pub lml: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Children in order.
    pub kids: Vec<Vec<usize>>,
}

impl<'t> Flat<'t> {
    pub fn new(t: &'t Tree) -> Flat<'t> {
        let mut f = Flat { nodes: Vec::new(), lml: Vec::new(), parent: Vec::new(), kids: Vec::new() };
        f.walk(t);
        f
    }

    fn walk(&mut self, t: &'t Tree) -> usize {
        let first = self.nodes.len();
        let kids: Vec<usize> = t.children.iter().map(|c| self.walk(c)).collect();
        let id = self.nodes.len();
        for &k in &kids {
            self.parent[k] = Some(id);
        }
        self.nodes.push(t);
        self.lml.push(if kids.is_empty() { id } else { self.lml[first] });
        self.parent.push(None);
        self.kids.push(kids);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    fn keyroots(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        let mut out: Vec<usize> = (0..self.len()).rev().filter(|&i| seen.insert(self.lml[i])).collect();
        out.sort_unstable();
        out
    }
}

/// Optimal mapping between two trees: pairs of post-order indices.
pub(super) struct Solution {
    pub cost: usize,
    pub pairs: Vec<(usize, usize)>,
}

pub(super) fn solve(a: &Flat<'_>, b: &Flat<'_>) -> Solution {
    let (n, m) = (a.len(), b.len());
    let mut td = vec![vec![0usize; m]; n];
    let ka = a.keyroots();
    let kb = b.keyroots();
    for &i in &ka {
        for &j in &kb {
            forest(a, b, i, j, &mut td);
        }
    }
    let cost = td[n - 1][m - 1];
    let mut pairs = Vec::new();
    let mut stack = vec![(n - 1, m - 1)];
    while let Some((i, j)) = stack.pop() {
        let fd = forest(a, b, i, j, &mut td);
        let (li, lj) = (a.lml[i], b.lml[j]);
        // fd is indexed by (row - li + 1, col - lj + 1); 0 is the empty forest.
        let (mut r, mut c) = (i + 1 - li, j + 1 - lj);
        while r > 0 || c > 0 {
            let (ra, cb) = ((r + li).wrapping_sub(1), (c + lj).wrapping_sub(1));
            if r > 0 && fd[r - 1][c] + 1 == fd[r][c] {
                r -= 1;
            } else if c > 0 && fd[r][c - 1] + 1 == fd[r][c] {
                c -= 1;
            } else if a.lml[ra] == li && b.lml[cb] == lj {
                pairs.push((ra, cb));
                r -= 1;
                c -= 1;
            } else {
                stack.push((ra, cb));
                r = a.lml[ra] - li;
                c = b.lml[cb] - lj;
            }
        }
    }
    pairs.sort_unstable();
    Solution { cost, pairs }
}

fn forest(a: &Flat<'_>, b: &Flat<'_>, i: usize, j: usize, td: &mut [Vec<usize>]) -> Vec<Vec<usize>> {
    let (li, lj) = (a.lml[i], b.lml[j]);
    let (rows, cols) = (i + 2 - li, j + 2 - lj);
    let mut fd = vec![vec![0usize; cols]; rows];
    for r in 1..rows {
        fd[r][0] = fd[r - 1][0] + 1;
    }
    for c in 1..cols {
        fd[0][c] = fd[0][c - 1] + 1;
    }
    for r in 1..rows {
        let x = r + li - 1;
        for c in 1..cols {
            let y = c + lj - 1;
            let del = fd[r - 1][c] + 1;
            let ins = fd[r][c - 1] + 1;
            if a.lml[x] == li && b.lml[y] == lj {
                let upd = fd[r - 1][c - 1] + usize::from(a.nodes[x].label != b.nodes[y].label);
                fd[r][c] = del.min(ins).min(upd);
                td[x][y] = fd[r][c];
            } else {
                let sub = fd[a.lml[x] - li][b.lml[y] - lj] + td[x][y];
                fd[r][c] = del.min(ins).min(sub);
            }
        }
    }
    fd
}
