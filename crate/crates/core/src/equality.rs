//! Subtree and sibling-sequence equality over compressed representations.
//!
//! Every index derives an SL string grammar whose expansion lists one
//! symbol per preorder position, so that two positions hold equal
//! subtrees (or sibling sequences) iff they carry equal symbols.

use num_bigint::BigUint;

use crate::dag::{BinaryDag, Dag};
use crate::error::{Error, Result};
use crate::hybrid::{HybridDag, Orientation};
use crate::label::Label;
use crate::slstring::{AccessIndex, GSym, SlGrammar};
use crate::slt::CompressedDag;

/// Minimality checks expand child sequences up to this many symbols.
pub const MINIMALITY_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Dag,
    Bdag,
    Compressed,
}

/// The derived grammar and its access structure.
#[derive(Clone, Debug)]
pub struct PositionGrammar {
    grammar: SlGrammar,
    start: Vec<GSym>,
    access: AccessIndex,
}

impl PositionGrammar {
    fn new(rules: Vec<Vec<GSym>>, start: Vec<GSym>) -> PositionGrammar {
        let grammar = SlGrammar::new(rules).expect("derived grammar is acyclic");
        let access = AccessIndex::new(&grammar, &start);
        PositionGrammar { grammar, start, access }
    }

    pub fn grammar(&self) -> &SlGrammar {
        &self.grammar
    }

    pub fn start(&self) -> &[GSym] {
        &self.start
    }

    /// Length of the derived string.
    pub fn len(&self) -> &BigUint {
        self.access.len()
    }

    pub fn is_empty(&self) -> bool {
        self.access.is_empty()
    }

    /// The whole derived string.
    pub fn expand(&self, budget: u64) -> Result<Vec<u32>> {
        self.grammar.expand(&self.start, budget)
    }

    pub fn at(&self, p: &BigUint) -> Result<u32> {
        self.access.get(p)
    }

    pub fn at_u64(&self, p: u64) -> Result<u32> {
        self.access.get_u64(p)
    }
}

/// `û → u û_1 ⋯ û_n` over a bdag, with `□` children dropped.
fn bdag_grammar(d: &BinaryDag) -> Result<PositionGrammar> {
    if !d.is_minimal() {
        return Err(Error::InvalidArgument("binary dag is not minimal".into()));
    }
    let Some(root) = d.root() else {
        return Err(Error::InvalidArgument("empty binary dag".into()));
    };
    let rules = (0..d.nodes() as u32)
        .map(|u| {
            let mut r = vec![GSym::T(u)];
            r.extend(d.left(u).map(GSym::N));
            r.extend(d.right(u).map(GSym::N));
            r
        })
        .collect();
    Ok(PositionGrammar::new(rules, vec![GSym::N(root)]))
}

#[derive(Clone, Debug)]
enum Kind {
    Plain,
    Binary { labels: Vec<Label>, left: Vec<Option<u32>> },
}

/// Answers `t/p = t/q` for 1-based preorder positions.
#[derive(Clone, Debug)]
pub struct SubtreeIndex {
    source: Source,
    kind: Kind,
    positions: PositionGrammar,
}

impl SubtreeIndex {
    /// From the minimal dag; symbols are dag nodes.
    pub fn from_dag(d: &Dag) -> Result<SubtreeIndex> {
        if d.roots().len() != 1 || !d.is_minimal() {
            return Err(Error::InvalidArgument("expected the minimal dag of a tree".into()));
        }
        let rules = (0..d.nodes() as u32)
            .map(|u| {
                let mut r = vec![GSym::T(u)];
                r.extend(d.children(u).iter().map(|&c| GSym::N(c)));
                r
            })
            .collect();
        Ok(SubtreeIndex {
            source: Source::Dag,
            kind: Kind::Plain,
            positions: PositionGrammar::new(rules, vec![GSym::N(d.root())]),
        })
    }

    /// From the minimal binary dag of the fcns encoding.
    pub fn from_bdag(d: &BinaryDag) -> Result<SubtreeIndex> {
        let positions = bdag_grammar(d)?;
        let n = d.nodes() as u32;
        Ok(SubtreeIndex {
            source: Source::Bdag,
            kind: Kind::Binary {
                labels: (0..n).map(|u| d.label(u)).collect(),
                left: (0..n).map(|u| d.left(u)).collect(),
            },
            positions,
        })
    }

    /// From a minimal SL grammar-compressed dag. String nonterminals are
    /// copied with every node `u` replaced by `û`.
    pub fn from_compressed(d: &CompressedDag) -> Result<SubtreeIndex> {
        if !d.is_minimal(MINIMALITY_BUDGET)? {
            return Err(Error::NonMinimalCompressedDag);
        }
        let nn = d.nonterminal_count() as u32;
        let hat = |s: &GSym| match *s {
            GSym::T(u) => GSym::N(nn + u),
            GSym::N(x) => GSym::N(x),
        };
        let mut rules: Vec<Vec<GSym>> = d.grammar().rules().iter().map(|w| w.iter().map(hat).collect()).collect();
        for u in 0..d.node_count() as u32 {
            let mut r = vec![GSym::T(u)];
            r.extend(d.gamma(u).iter().map(hat));
            rules.push(r);
        }
        Ok(SubtreeIndex {
            source: Source::Compressed,
            kind: Kind::Plain,
            positions: PositionGrammar::new(rules, vec![GSym::N(nn + d.root())]),
        })
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn positions(&self) -> &PositionGrammar {
        &self.positions
    }

    /// Number of tree nodes `N`.
    pub fn len(&self) -> &BigUint {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn same(&self, a: u32, b: u32) -> bool {
        match &self.kind {
            Kind::Plain => a == b,
            Kind::Binary { labels, left } => {
                labels[a as usize] == labels[b as usize] && left[a as usize] == left[b as usize]
            }
        }
    }

    pub fn subtree_eq(&self, p: u64, q: u64) -> Result<bool> {
        let a = self.positions.at_u64(p)?;
        let b = self.positions.at_u64(q)?;
        Ok(self.same(a, b))
    }

    pub fn subtree_eq_big(&self, p: &BigUint, q: &BigUint) -> Result<bool> {
        let a = self.positions.at(p)?;
        let b = self.positions.at(q)?;
        Ok(self.same(a, b))
    }
}

#[derive(Clone, Debug)]
enum Sib {
    /// A single-node tree.
    Single,
    /// Symbols at `p − 1` in the grammar over the right-regular hdag.
    Hdag(PositionGrammar),
    /// Symbols at `p` in the bdag position grammar.
    Bdag(PositionGrammar),
}

/// Answers `sibseq(p) = sibseq(q)` for 1-based preorder positions.
#[derive(Clone, Debug)]
pub struct SibseqIndex {
    inner: Sib,
}

impl SibseqIndex {
    /// Via the hdag built from the dag's reduced grammar.
    pub fn from_dag(d: &Dag) -> Result<SibseqIndex> {
        if d.roots().len() != 1 || !d.is_minimal() {
            return Err(Error::InvalidArgument("expected the minimal dag of a tree".into()));
        }
        if d.is_leaf(d.root()) {
            return Ok(SibseqIndex { inner: Sib::Single });
        }
        SibseqIndex::from_hdag(&HybridDag::from_dag(d, Orientation::Fcns)?)
    }

    /// Equal bdag symbols mean equal sibling sequences.
    pub fn from_bdag(d: &BinaryDag) -> Result<SibseqIndex> {
        Ok(SibseqIndex { inner: Sib::Bdag(bdag_grammar(d)?) })
    }

    /// `v → X̂` (or `ε`), `X̂ → X v Ŷ` (or `X v`) over the right-regular
    /// normal form, deriving one symbol per non-root node.
    pub fn from_hdag(h: &HybridDag) -> Result<SibseqIndex> {
        let d = h.normalize_right_regular()?;
        let nv = d.node_count() as u32;
        let mut rules: Vec<Vec<GSym>> = (0..nv)
            .map(|v| match d.gamma(v) {
                [] => Vec::new(),
                [GSym::N(x)] => vec![GSym::N(nv + x)],
                _ => unreachable!("normal form"),
            })
            .collect();
        for (x, rho) in d.grammar().rules().iter().enumerate() {
            let mut r = vec![GSym::T(x as u32)];
            match rho.as_slice() {
                [GSym::T(v)] => r.push(GSym::N(*v)),
                [GSym::T(v), GSym::N(y)] => r.extend([GSym::N(*v), GSym::N(nv + y)]),
                _ => unreachable!("normal form"),
            }
            rules.push(r);
        }
        Ok(SibseqIndex { inner: Sib::Hdag(PositionGrammar::new(rules, vec![GSym::N(d.root())])) })
    }

    /// The derived grammar, if the tree has more than one node.
    pub fn positions(&self) -> Option<&PositionGrammar> {
        match &self.inner {
            Sib::Single => None,
            Sib::Hdag(g) | Sib::Bdag(g) => Some(g),
        }
    }

    /// Number of tree nodes `N`.
    pub fn len(&self) -> BigUint {
        match &self.inner {
            Sib::Single => BigUint::from(1u32),
            Sib::Hdag(g) => g.len() + 1u32,
            Sib::Bdag(g) => g.len().clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sibseq_eq(&self, p: u64, q: u64) -> Result<bool> {
        self.sibseq_eq_big(&BigUint::from(p), &BigUint::from(q))
    }

    pub fn sibseq_eq_big(&self, p: &BigUint, q: &BigUint) -> Result<bool> {
        let n = self.len();
        for x in [p, q] {
            if *x == BigUint::default() || *x > n {
                return Err(Error::IndexOutOfRange { index: x.to_string(), len: n.to_string() });
            }
        }
        let one = BigUint::from(1u32);
        match &self.inner {
            Sib::Single => Ok(true),
            Sib::Bdag(g) => Ok(g.at(p)? == g.at(q)?),
            Sib::Hdag(_) if *p == one || *q == one => Ok(p == q),
            Sib::Hdag(g) => Ok(g.at(&(p - 1u32))? == g.at(&(q - 1u32))?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{minimize, minimize_binary};
    use crate::encode::fcns;
    use crate::slt::build_compressed_dag;
    use crate::tree::{parse_term, UnrankedTree};

    fn sample() -> UnrankedTree {
        parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap()
    }

    #[test]
    fn subtree_position_string() {
        let t = parse_term("f(a,g(a,a,a),h(a,a,b),f(g(a,a,a),h(a,a,b)),g(a,a,a),h(a,a,b),c)").unwrap();
        let d = build_compressed_dag(&t);
        let idx = SubtreeIndex::from_compressed(&d).unwrap();
        let root = d.root();
        let name = |v: u32| match d.label(v).as_str() {
            "f" if v == root => "A1",
            "f" => "A4",
            "g" => "A2",
            "h" => "A3",
            "a" => "A",
            "b" => "B",
            "c" => "C",
            _ => unreachable!(),
        };
        let s: Vec<&str> = idx.positions().expand(1000).unwrap().into_iter().map(name).collect();
        assert_eq!(
            s.join(" "),
            "A1 A A2 A A A A3 A A B A4 A2 A A A A3 A A B A2 A A A A3 A A B C"
        );
        assert_eq!(name(idx.positions().at_u64(2).unwrap()), "A");
        assert_eq!(idx.len(), &BigUint::from(t.len()));
    }

    #[test]
    fn sibseq_position_string() {
        let h = HybridDag::build(&sample(), Orientation::Fcns).unwrap();
        let idx = SibseqIndex::from_hdag(&h).unwrap();
        let s = idx.positions().unwrap().expand(100).unwrap();
        assert_eq!(s, vec![0, 1, 3, 2, 3, 1, 3, 2, 3]);
        assert!(idx.sibseq_eq(3, 7).unwrap());
        assert!(idx.sibseq_eq(1, 1).unwrap());
        assert!(!idx.sibseq_eq(1, 2).unwrap());
        assert!(idx.sibseq_eq(11, 1).is_err());
    }

    #[test]
    fn sample_subtrees() {
        let t = sample();
        let d = minimize(&t);
        let idx = SubtreeIndex::from_dag(&d).unwrap();
        assert_eq!(idx.positions().grammar().size(), d.nodes() + d.edges());
        let ga = [3, 5, 7, 9];
        for &p in &ga {
            for &q in &ga {
                assert!(idx.subtree_eq(p, q).unwrap());
            }
        }
        assert!(!idx.subtree_eq(2, 3).unwrap());
        assert!(idx.subtree_eq(0, 1).is_err());
        let b = SubtreeIndex::from_bdag(&minimize_binary(&fcns(&[t]))).unwrap();
        assert!(b.subtree_eq(3, 9).unwrap());
        assert!(!b.subtree_eq(2, 3).unwrap());
    }

    #[test]
    fn non_minimal_rejected() {
        use crate::slstring::SlGrammar;
        let a = Label::of("a");
        let d = CompressedDag::new(
            vec![Label::of("f"), a, a],
            vec![vec![GSym::T(1), GSym::T(2)], vec![], vec![]],
            SlGrammar::empty(),
            0,
        )
        .unwrap();
        assert_eq!(SubtreeIndex::from_compressed(&d).unwrap_err(), Error::NonMinimalCompressedDag);
    }

    #[test]
    fn single_node() {
        let t = parse_term("a").unwrap();
        let d = minimize(&t);
        let s = SubtreeIndex::from_dag(&d).unwrap();
        assert_eq!(s.positions().expand(10).unwrap(), vec![0]);
        assert!(s.subtree_eq(1, 1).unwrap());
        let q = SibseqIndex::from_dag(&d).unwrap();
        assert!(q.sibseq_eq(1, 1).unwrap());
        assert!(q.sibseq_eq(1, 2).is_err());
    }
}
