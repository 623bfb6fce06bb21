//! Seeded uniform random trees.
//!
//! A shuffled word of `n` up-steps and `n + 1` down-steps has exactly one
//! rotation whose proper prefixes stay nonnegative (cycle lemma); dropping its
//! final down-step leaves a uniform Dyck path, read as a plane tree with `n`
//! edges. Labels are drawn independently and uniformly afterwards.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::label::Label;
use crate::tree::{BinaryTree, TreeBuilder, UnrankedTree};

pub type TreeRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TreeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The first `m` labels `a, b, c, …` (then `l26, l27, …`).
pub fn alphabet(m: usize) -> Vec<Label> {
    (0..m)
        .map(|i| {
            if i < 26 {
                Label::of(&((b'a' + i as u8) as char).to_string())
            } else {
                Label::of(&format!("l{i}"))
            }
        })
        .collect()
}

/// A uniform Dyck word of semilength `n` (`true` = up).
pub fn dyck_word<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    let mut w: Vec<bool> = std::iter::repeat_n(true, n)
        .chain(std::iter::repeat_n(false, n + 1))
        .collect();
    w.shuffle(rng);
    // rotate to start right after the first position of minimal prefix sum
    let mut sum = 0i64;
    let mut best = (0i64, 0usize);
    for (i, &up) in w.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum < best.0 {
            best = (sum, i + 1);
        }
    }
    let len = w.len();
    w.rotate_left(best.1 % len);
    w.pop();
    w
}

/// A uniform tree with `n` edges over the labels `labels`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, labels: &[Label]) -> UnrankedTree {
    let word = dyck_word(rng, n);
    let mut b = TreeBuilder::new();
    b.open(labels[rng.random_range(0..labels.len())]);
    for up in word {
        if up {
            b.open(labels[rng.random_range(0..labels.len())]);
        } else {
            b.close();
        }
    }
    b.close();
    b.finish().unwrap()
}

/// A tree with a uniformly chosen edge count in `0..=max_edges`.
pub fn random_tree_upto<R: Rng>(rng: &mut R, max_edges: usize, labels: &[Label]) -> UnrankedTree {
    let n = rng.random_range(0..=max_edges);
    random_tree(rng, n, labels)
}

/// A forest of 1 to `max_trees` random trees.
pub fn random_forest<R: Rng>(
    rng: &mut R,
    max_trees: usize,
    max_edges: usize,
    labels: &[Label],
) -> Vec<UnrankedTree> {
    let k = rng.random_range(1..=max_trees);
    (0..k).map(|_| random_tree_upto(rng, max_edges, labels)).collect()
}

/// A random binary tree with `n` real nodes (uniform over shapes).
pub fn random_binary<R: Rng>(rng: &mut R, n: usize, labels: &[Label]) -> BinaryTree {
    // binary trees with n nodes are in bijection with plane trees with n edges
    let t = random_tree(rng, n, labels);
    let forest = t.root_subtrees();
    crate::encode::fcns(&forest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn dyck_words_balanced() {
        let mut r = rng(7);
        for n in 0..30 {
            let w = dyck_word(&mut r, n);
            assert_eq!(w.len(), 2 * n);
            let mut s = 0i64;
            for up in w {
                s += if up { 1 } else { -1 };
                assert!(s >= 0);
            }
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn shapes_roughly_uniform() {
        // 14 plane trees with 4 edges
        let mut r = rng(1);
        let a = alphabet(1);
        let mut seen: HashMap<String, usize> = HashMap::new();
        let draws = 14_000;
        for _ in 0..draws {
            *seen.entry(random_tree(&mut r, 4, &a).to_string()).or_default() += 1;
        }
        assert_eq!(seen.len(), 14);
        for &c in seen.values() {
            assert!((800..1200).contains(&c), "{c}");
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = alphabet(3);
        let x = random_tree(&mut rng(42), 50, &a);
        let y = random_tree(&mut rng(42), 50, &a);
        assert_eq!(x, y);
        assert_eq!(x.edges(), 50);
        assert_eq!(random_binary(&mut rng(3), 9, &a).len(), 9);
    }
}
