//! Exhaustive enumeration of small labeled trees.

use crate::label::Label;
use crate::tree::{BinaryTree, UnrankedTree};

/// All forests with exactly `nodes` nodes, built from `trees[k]` = all trees with `k` nodes.
fn forests(nodes: usize, trees: &[Vec<UnrankedTree>]) -> Vec<Vec<UnrankedTree>> {
    let mut table: Vec<Vec<Vec<UnrankedTree>>> = vec![vec![Vec::new()]];
    for s in 1..=nodes {
        let mut out = Vec::new();
        for first in 1..=s {
            for t in &trees[first] {
                for rest in &table[s - first] {
                    let mut f = Vec::with_capacity(rest.len() + 1);
                    f.push(t.clone());
                    f.extend(rest.iter().cloned());
                    out.push(f);
                }
            }
        }
        table.push(out);
    }
    table.pop().unwrap()
}

/// `result[k]` lists every unranked tree with `k` nodes over `labels`, for `k <= max_nodes`.
pub fn unranked_by_nodes(max_nodes: usize, labels: &[Label]) -> Vec<Vec<UnrankedTree>> {
    let mut trees: Vec<Vec<UnrankedTree>> = vec![Vec::new()];
    for k in 1..=max_nodes {
        let fs = forests(k - 1, &trees);
        let mut out = Vec::with_capacity(fs.len() * labels.len());
        for &l in labels {
            for f in &fs {
                out.push(UnrankedTree::node(l, f));
            }
        }
        trees.push(out);
    }
    trees
}

/// Every unranked tree with at most `max_nodes` nodes.
pub fn unranked_upto(max_nodes: usize, labels: &[Label]) -> Vec<UnrankedTree> {
    unranked_by_nodes(max_nodes, labels).into_iter().flatten().collect()
}

/// Every unranked tree with exactly `edges` edges.
pub fn unranked_with_edges(edges: usize, labels: &[Label]) -> Vec<UnrankedTree> {
    unranked_by_nodes(edges + 1, labels).pop().unwrap()
}

/// `result[k]` lists every binary tree with `k` real nodes; index 0 holds `□`.
pub fn binary_by_nodes(max_nodes: usize, labels: &[Label]) -> Vec<Vec<BinaryTree>> {
    let mut trees: Vec<Vec<BinaryTree>> = vec![vec![BinaryTree::empty()]];
    for k in 1..=max_nodes {
        let mut out = Vec::new();
        for &l in labels {
            for left in 0..k {
                for a in &trees[left] {
                    for b in &trees[k - 1 - left] {
                        out.push(BinaryTree::node(l, a, b));
                    }
                }
            }
        }
        trees.push(out);
    }
    trees
}

/// Every binary tree with exactly `edges` edges (`edges + 1` real nodes).
pub fn binary_with_edges(edges: usize, labels: &[Label]) -> Vec<BinaryTree> {
    binary_by_nodes(edges + 1, labels).pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::alphabet;

    #[test]
    fn catalan_counts() {
        let one = alphabet(1);
        let counts: Vec<usize> = unranked_by_nodes(7, &one).iter().map(Vec::len).collect();
        assert_eq!(counts, [0, 1, 1, 2, 5, 14, 42, 132]);
        let bin: Vec<usize> = binary_by_nodes(5, &one).iter().map(Vec::len).collect();
        assert_eq!(bin, [1, 1, 2, 5, 14, 42]);
        assert_eq!(unranked_with_edges(1, &alphabet(2)).len(), 4);
    }

    #[test]
    fn all_distinct() {
        let ts = unranked_upto(5, &alphabet(2));
        let set: std::collections::HashSet<_> = ts.iter().collect();
        assert_eq!(set.len(), ts.len());
    }
}
