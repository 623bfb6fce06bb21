//! First-child/next-sibling and last-child/previous-sibling encodings.

use crate::label::Label;
use crate::tree::{BinaryTree, TreeBuilder, UnrankedTree};

/// Lays a forest out in one arena; returns labels, per-node children in
/// global ids and the global id of each root.
fn flatten(forest: &[UnrankedTree]) -> (Vec<Label>, Vec<Vec<u32>>, Vec<u32>) {
    let mut labels = Vec::new();
    let mut kids = Vec::new();
    let mut roots = Vec::new();
    for t in forest {
        let base = labels.len() as u32;
        roots.push(base);
        labels.extend_from_slice(t.labels());
        for v in 0..t.len() as u32 {
            kids.push(t.children(v).iter().map(|&c| c + base).collect());
        }
    }
    (labels, kids, roots)
}

/// `fcns(t_1 ⋯ t_n)`: left child is the first child, right child the next sibling.
pub fn fcns(forest: &[UnrankedTree]) -> BinaryTree {
    let (labels, kids, roots) = flatten(forest);
    let n = labels.len();
    let mut left = vec![None; n];
    let mut right = vec![None; n];
    for (v, ks) in kids.iter().enumerate() {
        left[v] = ks.first().copied();
        for w in ks.windows(2) {
            right[w[0] as usize] = Some(w[1]);
        }
    }
    for w in roots.windows(2) {
        right[w[0] as usize] = Some(w[1]);
    }
    BinaryTree::from_parts(&labels, &left, &right, roots.first().copied()).unwrap()
}

/// `lcps(t_1 ⋯ t_n)`: left child is the previous sibling, right child the last child.
pub fn lcps(forest: &[UnrankedTree]) -> BinaryTree {
    let (labels, kids, roots) = flatten(forest);
    let n = labels.len();
    let mut left = vec![None; n];
    let mut right = vec![None; n];
    for (v, ks) in kids.iter().enumerate() {
        right[v] = ks.last().copied();
        for w in ks.windows(2) {
            left[w[1] as usize] = Some(w[0]);
        }
    }
    for w in roots.windows(2) {
        left[w[1] as usize] = Some(w[0]);
    }
    BinaryTree::from_parts(&labels, &left, &right, roots.last().copied()).unwrap()
}

fn build(b: &BinaryTree, roots: &[u32], kids: &[Vec<u32>]) -> Vec<UnrankedTree> {
    roots
        .iter()
        .map(|&r| {
            let mut tb = TreeBuilder::new();
            let mut stack = vec![(r, false)];
            while let Some((v, done)) = stack.pop() {
                if done {
                    tb.close();
                    continue;
                }
                tb.open(b.label(v));
                stack.push((v, true));
                for &c in kids[v as usize].iter().rev() {
                    stack.push((c, false));
                }
            }
            tb.finish().unwrap()
        })
        .collect()
}

fn chain(start: Option<u32>, step: impl Fn(u32) -> Option<u32>) -> Vec<u32> {
    let mut out = Vec::new();
    let mut cur = start;
    while let Some(v) = cur {
        out.push(v);
        cur = step(v);
    }
    out
}

pub fn fcns_inverse(b: &BinaryTree) -> Vec<UnrankedTree> {
    let kids: Vec<Vec<u32>> = (0..b.len() as u32)
        .map(|v| chain(b.left(v), |x| b.right(x)))
        .collect();
    let roots = chain(b.root(), |x| b.right(x));
    build(b, &roots, &kids)
}

pub fn lcps_inverse(b: &BinaryTree) -> Vec<UnrankedTree> {
    let kids: Vec<Vec<u32>> = (0..b.len() as u32)
        .map(|v| {
            let mut k = chain(b.right(v), |x| b.left(x));
            k.reverse();
            k
        })
        .collect();
    let mut roots = chain(b.root(), |x| b.left(x));
    roots.reverse();
    build(b, &roots, &kids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    fn forest(s: &[&str]) -> Vec<UnrankedTree> {
        s.iter().map(|x| parse_term(x).unwrap()).collect()
    }

    #[test]
    fn fcns_of_two_trees() {
        let f = forest(&["f(a1,a2,a3)", "g(b1,b2)"]);
        let b = fcns(&f);
        assert_eq!(b.to_string(), "f(a1(□,a2(□,a3)),g(b1(□,b2),□))");
        assert_eq!(fcns_inverse(&b), f);
    }

    #[test]
    fn lcps_of_two_trees() {
        let f = forest(&["f(a1,a2,a3)", "g(b1,b2)"]);
        let b = lcps(&f);
        assert_eq!(b.to_string(), "g(f(□,a3(a2(a1,□),□)),b2(b1,□))");
        assert_eq!(lcps_inverse(&b), f);
    }

    #[test]
    fn single_leaf_and_empty() {
        let f = forest(&["a"]);
        assert_eq!(fcns(&f).to_string(), "a");
        assert_eq!(lcps(&f).to_string(), "a");
        assert!(fcns(&[]).is_box());
        assert!(fcns_inverse(&BinaryTree::empty()).is_empty());
        assert!(lcps_inverse(&BinaryTree::empty()).is_empty());
    }

    #[test]
    fn fcns_preserves_edge_size() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let b = fcns(std::slice::from_ref(&t));
        assert_eq!(b.len(), t.len());
        assert_eq!(b.edges(), t.edges());
    }
}
