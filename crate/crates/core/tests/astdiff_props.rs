mod common;

use common::oracle::brute_force_distance;
use common::small_tree;
use mdlab::astdiff::diff_trees;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn distance_matches_exhaustive_search(a in small_tree(6), b in small_tree(6)) {
        let s = diff_trees(&a, &b);
        prop_assert_eq!(s.base_cost, brute_force_distance(&a, &b));
        prop_assert!(s.cost() <= s.base_cost);
    }

    #[test]
    fn replay_reproduces_target(a in small_tree(8), b in small_tree(8)) {
        prop_assert_eq!(diff_trees(&a, &b).apply(&a).unwrap(), b);
    }

    #[test]
    fn identity_is_free(a in small_tree(8)) {
        prop_assert_eq!(diff_trees(&a, &a).cost(), 0);
    }
}

#[test]
fn oracle_agrees_on_known_distances() {
    use mdlab::astdiff::Tree;
    let n = |l: &str, k: Vec<Tree>| Tree::node(l, k);
    let l = Tree::leaf;
    let a = n("f", vec![n("d", vec![l("a"), n("c", vec![l("b")])]), l("e")]);
    let b = n("f", vec![n("c", vec![n("d", vec![l("a"), l("b")])]), l("e")]);
    assert_eq!(brute_force_distance(&a, &b), 2);
    assert_eq!(brute_force_distance(&l("a"), &n("b", vec![l("a"), l("a")])), 2);
    assert_eq!(brute_force_distance(&a, &a), 0);
}
