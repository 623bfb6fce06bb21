//! Hybrid dags: the minimal dag of the binary-encoded right-hand sides of
//! the reduced grammar, sharing common suffixes (fcns) or prefixes (lcps) of
//! child sequences.

pub mod accounting;
pub mod bounds;
mod text;
pub mod witness;

use crate::dag::{minimize, BinaryDag, BinaryDagBuilder, Dag, ReducedGrammar, Rule, Symbol};
use crate::error::Result;
use crate::label::Label;
use crate::tree::UnrankedTree;

pub use text::{parse_hybrid, write_hybrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Fcns,
    Lcps,
}

/// Label of a node in the shared binary dag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HLabel {
    /// Root of the encoded right-hand side of `rule`, carrying the rule as an
    /// extra annotation so that distinct rules never merge.
    Root { rule: u32, label: Label },
    /// One position of a child sequence.
    Sym(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridDag {
    shared: BinaryDag<HLabel>,
    start: u32,
    orientation: Orientation,
}

impl HybridDag {
    pub fn from_grammar(g: &ReducedGrammar, orientation: Orientation) -> HybridDag {
        let mut b = BinaryDagBuilder::new();
        let mut roots = Vec::with_capacity(g.rules().len());
        for (i, r) in g.rules().iter().enumerate() {
            let root = HLabel::Root {
                rule: i as u32,
                label: r.label,
            };
            let id = match orientation {
                Orientation::Fcns => {
                    let mut next = None;
                    for &s in r.children.iter().rev() {
                        next = Some(b.node(HLabel::Sym(s), None, next));
                    }
                    b.node(root, next, None)
                }
                Orientation::Lcps => {
                    let mut prev = None;
                    for &s in &r.children {
                        prev = Some(b.node(HLabel::Sym(s), prev, None));
                    }
                    b.node(root, None, prev)
                }
            };
            roots.push(Some(id));
        }
        HybridDag {
            shared: b.finish(roots),
            start: g.start(),
            orientation,
        }
    }

    pub fn from_dag(d: &Dag, orientation: Orientation) -> Result<HybridDag> {
        Ok(HybridDag::from_grammar(&ReducedGrammar::from_dag(d)?, orientation))
    }

    /// `hdag(t)` or `rhdag(t)`; single-node trees have none.
    pub fn build(t: &UnrankedTree, orientation: Orientation) -> Result<HybridDag> {
        HybridDag::from_dag(&minimize(t), orientation)
    }

    pub(crate) fn from_parts(
        shared: BinaryDag<HLabel>,
        start: u32,
        orientation: Orientation,
    ) -> HybridDag {
        HybridDag {
            shared,
            start,
            orientation,
        }
    }

    /// Edge size: edges to real nodes of the shared dag.
    pub fn edges(&self) -> usize {
        self.shared.edges()
    }

    pub fn nodes(&self) -> usize {
        self.shared.nodes()
    }

    /// Number of rules of the underlying reduced grammar.
    pub fn rule_count(&self) -> usize {
        self.shared.roots().len()
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn shared(&self) -> &BinaryDag<HLabel> {
        &self.shared
    }

    /// Shared node encoding the right-hand side of `rule`.
    pub fn rule_root(&self, rule: u32) -> u32 {
        self.shared.roots()[rule as usize].unwrap()
    }

    /// First chain node of `rule`'s child sequence.
    pub fn rule_chain(&self, rule: u32) -> Option<u32> {
        self.chain_start(self.rule_root(rule))
    }

    pub(crate) fn chain_start(&self, root: u32) -> Option<u32> {
        match self.orientation {
            Orientation::Fcns => self.shared.left(root),
            Orientation::Lcps => self.shared.right(root),
        }
    }

    /// The chain successor of a sequence node: next sibling (fcns) or previous sibling (lcps).
    pub fn chain_next(&self, v: u32) -> Option<u32> {
        match self.orientation {
            Orientation::Fcns => self.shared.right(v),
            Orientation::Lcps => self.shared.left(v),
        }
    }

    pub fn symbol(&self, v: u32) -> Symbol {
        match self.shared.label(v) {
            HLabel::Sym(s) => s,
            HLabel::Root { .. } => panic!("node {v} is a rule root"),
        }
    }

    /// Symbols along a chain in child order.
    pub fn chain_symbols(&self, start: Option<u32>) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut cur = start;
        while let Some(v) = cur {
            out.push(self.symbol(v));
            cur = self.chain_next(v);
        }
        if self.orientation == Orientation::Lcps {
            out.reverse();
        }
        out
    }

    /// First decoding pass: recover the reduced grammar.
    pub fn to_grammar(&self) -> Result<ReducedGrammar> {
        let rules = (0..self.rule_count() as u32)
            .map(|i| {
                let root = self.rule_root(i);
                let HLabel::Root { label, .. } = self.shared.label(root) else {
                    unreachable!()
                };
                Rule {
                    label,
                    children: self.chain_symbols(self.chain_start(root)),
                }
            })
            .collect();
        ReducedGrammar::from_rules(rules, self.start)
    }

    /// Unshares sequences, decodes the binary encoding, and unfolds the dag.
    pub fn unfold(&self) -> Result<UnrankedTree> {
        self.to_grammar()?.to_dag().unfold()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::tree::parse_term;

    #[test]
    fn sample_hdag() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let h = HybridDag::build(&t, Orientation::Fcns).unwrap();
        assert_eq!(h.edges(), 5);
        assert_eq!(h.unfold().unwrap(), t);
        let r = HybridDag::build(&t, Orientation::Lcps).unwrap();
        assert_eq!(r.unfold().unwrap(), t);
    }

    #[test]
    fn shared_prefixes_rhdag() {
        let t = parse_term("f(f(a,a,b),f(a,a,c))").unwrap();
        assert_eq!(HybridDag::build(&t, Orientation::Fcns).unwrap().edges(), 8);
        assert_eq!(HybridDag::build(&t, Orientation::Lcps).unwrap().edges(), 7);
    }

    #[test]
    fn single_node_rejected() {
        let t = parse_term("a").unwrap();
        assert_eq!(HybridDag::build(&t, Orientation::Fcns), Err(Error::SingleNodeDag));
    }
}
