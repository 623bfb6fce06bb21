//! Edge accounting over sibling sequences.
//!
//! `|bdag(t)| = Σ_{w ∈ sib(t)} e(w)`, and `|hdag(t)|` equals both
//! `Σ_{w ∈ sib(𝒢)} e(w)` and `|N| + Σ_{w ∈ sib(t)} e(w̃)`.

use std::collections::HashMap;

use crate::dag::{minimize_with_ids, ReducedGrammar, Symbol};
use crate::error::{Error, Result};
use crate::tree::UnrankedTree;

/// `e(w)` for a sibling sequence given the edge sizes of its trees.
pub fn edge_count_e(sizes: &[usize]) -> Result<u8> {
    match sizes {
        [] => Err(Error::EmptySequence),
        [0] => Ok(0),
        [_] => Ok(1),
        [0, ..] => Ok(1),
        _ => Ok(2),
    }
}

/// `e(w)` for a sequence of trees.
pub fn edge_count_e_trees(w: &[UnrankedTree]) -> Result<u8> {
    let sizes: Vec<usize> = w.iter().map(|t| t.edges()).collect();
    edge_count_e(&sizes)
}

const NIL: u32 = u32::MAX;

/// Distinct sibling sequences of `t`: for each, the edge size of its first
/// tree and its length (capped at 2).
fn sibseqs(t: &UnrankedTree) -> Vec<(usize, u8)> {
    let (_, ids) = minimize_with_ids(t);
    // a sequence is (dag id of its first tree, id of the remaining sequence)
    let mut seen: HashMap<(u32, u32), u32> = HashMap::new();
    let mut out = Vec::new();
    let mut intern = |head: u32, tail: u32, size: usize, out: &mut Vec<(usize, u8)>| -> u32 {
        let next = seen.len() as u32;
        *seen.entry((head, tail)).or_insert_with(|| {
            out.push((size, if tail == NIL { 1 } else { 2 }));
            next
        })
    };
    intern(ids[0], NIL, t.edges(), &mut out);
    for v in 0..t.len() as u32 {
        let mut tail = NIL;
        for &c in t.children(v).iter().rev() {
            tail = intern(ids[c as usize], tail, t.subtree_edges(c), &mut out);
        }
    }
    out
}

fn e_of(first_size: usize, len: u8) -> usize {
    match (len, first_size) {
        (1, 0) => 0,
        (1, _) => 1,
        (_, 0) => 1,
        _ => 2,
    }
}

/// Number of distinct sibling sequences of `t`.
pub fn distinct_sibseqs(t: &UnrankedTree) -> usize {
    sibseqs(t).len()
}

pub fn bdag_size_by_accounting(t: &UnrankedTree) -> usize {
    sibseqs(t).into_iter().map(|(s, l)| e_of(s, l)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HdagAccounting {
    /// `Σ_{w ∈ sib(𝒢)} e(w)`.
    pub over_grammar: usize,
    /// `|N| + Σ_{w ∈ sib(t)} e(w̃)`.
    pub over_tree: usize,
    pub nonterminals: usize,
}

/// `Σ_{w ∈ sib(𝒢)} e(w)` directly from the grammar's child sequences.
pub fn hdag_size_over_grammar(g: &ReducedGrammar) -> usize {
    // each right-hand side is a length-1 sequence of a non-symbol tree: e = 1
    let mut total = g.rules().len();
    let mut seen: HashMap<(Symbol, u32), u32> = HashMap::new();
    for seq in g.child_sequences() {
        let mut tail = NIL;
        for &s in seq.iter().rev() {
            let next = seen.len() as u32;
            let len_two = tail != NIL;
            tail = *seen.entry((s, tail)).or_insert_with(|| {
                // a symbol is a size-0 tree
                total += e_of(0, if len_two { 2 } else { 1 });
                next
            });
        }
    }
    total
}

pub fn hdag_size_by_accounting(t: &UnrankedTree) -> Result<HdagAccounting> {
    let (d, _) = minimize_with_ids(t);
    let g = ReducedGrammar::from_dag(&d)?;
    let n = g.rules().len();
    // w̃ consists of symbols only, so e(w̃) is 1 iff |w| ≥ 2
    let over_tree = n + sibseqs(t).into_iter().filter(|&(_, l)| l == 2).count();
    Ok(HdagAccounting {
        over_grammar: hdag_size_over_grammar(&g),
        over_tree,
        nonterminals: n,
    })
}
