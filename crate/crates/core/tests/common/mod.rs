#![allow(dead_code)]

pub mod oracle;

use mdlab::astdiff::Tree;
use proptest::prelude::*;

/// Ordered trees with up to `max` nodes over the labels `a`, `b`, `c`.
pub fn small_tree(max: usize) -> impl Strategy<Value = Tree> {
    prop::collection::vec((0..3u8, any::<prop::sample::Index>()), 0..max).prop_map(|steps| {
        let label = |k: u8| ["a", "b", "c"][k as usize].to_string();
        // Each new node becomes the last child of a node on the rightmost path.
        let mut root = Tree::leaf("a");
        for (k, at) in steps {
            let mut depth = 0;
            let mut cur = &root;
            while let Some(c) = cur.children.last() {
                depth += 1;
                cur = c;
            }
            let mut target = at.index(depth + 1);
            let mut cur = &mut root;
            while target > 0 {
                cur = cur.children.last_mut().unwrap();
                target -= 1;
            }
            cur.children.push(Tree::leaf(label(k)));
        }
        root
    })
}
