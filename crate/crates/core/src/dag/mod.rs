//! Minimal dags by hash-consing, unfolding, and the reduced grammar view.

mod text;

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::tree::{BinaryTree, UnrankedTree};

pub use text::{parse_binary_dag, parse_dag, write_binary_dag, write_dag};

/// Default node budget for unfolding.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// An ordered labeled dag; a child always has a smaller id than its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag<L = Label> {
    labels: Vec<L>,
    offsets: Vec<u32>,
    kids: Vec<u32>,
    roots: Vec<u32>,
}

/// Hash-consing constructor for [`Dag`].
pub struct DagBuilder<L> {
    index: HashMap<(L, Vec<u32>), u32>,
    labels: Vec<L>,
    offsets: Vec<u32>,
    kids: Vec<u32>,
}

impl<L: Copy + Eq + Hash> Default for DagBuilder<L> {
    fn default() -> Self {
        DagBuilder {
            index: HashMap::new(),
            labels: Vec::new(),
            offsets: vec![0],
            kids: Vec::new(),
        }
    }
}

impl<L: Copy + Eq + Hash> DagBuilder<L> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the unique node with this label and child word, creating it if new.
    pub fn node(&mut self, label: L, children: &[u32]) -> u32 {
        let key = (label, children.to_vec());
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.labels.len() as u32;
        debug_assert!(children.iter().all(|&c| c < id));
        self.labels.push(label);
        self.kids.extend_from_slice(children);
        self.offsets.push(self.kids.len() as u32);
        self.index.insert(key, id);
        id
    }

    pub fn finish(self, roots: Vec<u32>) -> Dag<L> {
        Dag {
            labels: self.labels,
            offsets: self.offsets,
            kids: self.kids,
            roots,
        }
    }
}

impl<L: Copy + Eq + Hash> Dag<L> {
    /// Builds a dag from explicit nodes; children must refer to smaller ids.
    pub fn from_nodes(nodes: Vec<(L, Vec<u32>)>, roots: Vec<u32>) -> Result<Dag<L>> {
        let mut labels = Vec::with_capacity(nodes.len());
        let mut offsets = vec![0];
        let mut kids = Vec::new();
        for (i, (l, ks)) in nodes.into_iter().enumerate() {
            if ks.iter().any(|&c| c as usize >= i) {
                return Err(Error::MalformedGrammar(format!(
                    "node {i} has a child that is not smaller"
                )));
            }
            labels.push(l);
            kids.extend(ks);
            offsets.push(kids.len() as u32);
        }
        if roots.is_empty() || roots.iter().any(|&r| r as usize >= labels.len()) {
            return Err(Error::MalformedGrammar("invalid root".into()));
        }
        Ok(Dag {
            labels,
            offsets,
            kids,
            roots,
        })
    }

    /// Node size `‖d‖`.
    pub fn nodes(&self) -> usize {
        self.labels.len()
    }

    /// Edge size `|d|`.
    pub fn edges(&self) -> usize {
        self.kids.len()
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn root(&self) -> u32 {
        self.roots[0]
    }

    pub fn label(&self, v: u32) -> L {
        self.labels[v as usize]
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.kids[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.children(v).is_empty()
    }

    /// Number of nodes of every unfolding, saturating at `u64::MAX`.
    pub fn unfolded_sizes(&self) -> Vec<u64> {
        let mut size = vec![0u64; self.nodes()];
        for v in 0..self.nodes() as u32 {
            let s = self
                .children(v)
                .iter()
                .fold(1u64, |acc, &c| acc.saturating_add(size[c as usize]));
            size[v as usize] = s;
        }
        size
    }

    /// Re-minimizes with ids in post-order of first appearance from the roots.
    pub fn canonical(&self) -> Dag<L> {
        let mut b = DagBuilder::new();
        let mut map: Vec<Option<u32>> = vec![None; self.nodes()];
        let mut roots = Vec::new();
        for &r in &self.roots {
            let mut stack = vec![(r, false)];
            while let Some((v, expanded)) = stack.pop() {
                if map[v as usize].is_some() {
                    continue;
                }
                if expanded {
                    let ks: Vec<u32> = self
                        .children(v)
                        .iter()
                        .map(|&c| map[c as usize].unwrap())
                        .collect();
                    map[v as usize] = Some(b.node(self.label(v), &ks));
                } else {
                    stack.push((v, true));
                    for &c in self.children(v).iter().rev() {
                        if map[c as usize].is_none() {
                            stack.push((c, false));
                        }
                    }
                }
            }
            roots.push(map[r as usize].unwrap());
        }
        b.finish(roots)
    }

    /// True iff no two nodes unfold to the same tree.
    pub fn is_minimal(&self) -> bool {
        let mut b = DagBuilder::new();
        for v in 0..self.nodes() as u32 {
            let id = b.node(self.label(v), self.children(v));
            if id != v {
                return false;
            }
        }
        true
    }
}

impl Dag<Label> {
    /// Full unfolding of node `v`, refusing trees with more than `budget` nodes.
    pub fn eval_with_budget(&self, v: u32, budget: u64) -> Result<UnrankedTree> {
        let sizes = self.unfolded_sizes();
        if sizes[v as usize] > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let n = sizes[v as usize] as usize;
        let mut labels = Vec::with_capacity(n);
        let mut arities = Vec::with_capacity(n);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            labels.push(self.label(u));
            arities.push(self.children(u).len() as u32);
            stack.extend(self.children(u).iter().rev());
        }
        UnrankedTree::from_preorder(labels, arities)
    }

    pub fn eval(&self, v: u32) -> Result<UnrankedTree> {
        self.eval_with_budget(v, DEFAULT_BUDGET)
    }

    /// Unfolds the first root.
    pub fn unfold(&self) -> Result<UnrankedTree> {
        self.eval(self.root())
    }
}

fn postorder(t: &UnrankedTree) -> Vec<u32> {
    let mut out = Vec::with_capacity(t.len());
    let mut stack = vec![(0u32, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            out.push(v);
        } else {
            stack.push((v, true));
            for &c in t.children(v).iter().rev() {
                stack.push((c, false));
            }
        }
    }
    out
}

fn add_tree(b: &mut DagBuilder<Label>, t: &UnrankedTree) -> Vec<u32> {
    let mut id = vec![0u32; t.len()];
    let mut buf = Vec::new();
    for v in postorder(t) {
        buf.clear();
        buf.extend(t.children(v).iter().map(|&c| id[c as usize]));
        id[v as usize] = b.node(t.label(v), &buf);
    }
    id
}

/// The minimal dag of a tree.
pub fn minimize(t: &UnrankedTree) -> Dag {
    minimize_forest(std::slice::from_ref(t))
}

/// The minimal dag together with the dag node of every tree node (by preorder id).
pub fn minimize_with_ids(t: &UnrankedTree) -> (Dag, Vec<u32>) {
    let mut b = DagBuilder::new();
    let ids = add_tree(&mut b, t);
    let root = ids[0];
    (b.finish(vec![root]), ids)
}

/// The minimal dag of a forest, sharing across trees; roots keep input order.
pub fn minimize_forest(forest: &[UnrankedTree]) -> Dag {
    let mut b = DagBuilder::new();
    let roots = forest.iter().map(|t| add_tree(&mut b, t)[0]).collect();
    b.finish(roots)
}

/// A binary dag; `None` children are `□` and are not counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDag<L = Label> {
    labels: Vec<L>,
    left: Vec<Option<u32>>,
    right: Vec<Option<u32>>,
    roots: Vec<Option<u32>>,
}

pub struct BinaryDagBuilder<L> {
    index: HashMap<(L, Option<u32>, Option<u32>), u32>,
    labels: Vec<L>,
    left: Vec<Option<u32>>,
    right: Vec<Option<u32>>,
}

impl<L: Copy + Eq + Hash> Default for BinaryDagBuilder<L> {
    fn default() -> Self {
        BinaryDagBuilder {
            index: HashMap::new(),
            labels: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
        }
    }
}

impl<L: Copy + Eq + Hash> BinaryDagBuilder<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, label: L, left: Option<u32>, right: Option<u32>) -> u32 {
        *self.index.entry((label, left, right)).or_insert_with(|| {
            self.labels.push(label);
            self.left.push(left);
            self.right.push(right);
            self.labels.len() as u32 - 1
        })
    }

    pub fn finish(self, roots: Vec<Option<u32>>) -> BinaryDag<L> {
        BinaryDag {
            labels: self.labels,
            left: self.left,
            right: self.right,
            roots,
        }
    }
}

impl<L: Copy + Eq + Hash> BinaryDag<L> {
    pub fn from_nodes(
        nodes: Vec<(L, Option<u32>, Option<u32>)>,
        roots: Vec<Option<u32>>,
    ) -> Result<BinaryDag<L>> {
        let n = nodes.len();
        for (i, &(_, l, r)) in nodes.iter().enumerate() {
            if l.is_some_and(|c| c as usize >= i) || r.is_some_and(|c| c as usize >= i) {
                return Err(Error::MalformedGrammar(format!(
                    "binary node {i} has a child that is not smaller"
                )));
            }
        }
        if roots.iter().flatten().any(|&r| r as usize >= n) {
            return Err(Error::MalformedGrammar("invalid root".into()));
        }
        let mut d = BinaryDag {
            labels: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
            roots,
        };
        for (l, a, b) in nodes {
            d.labels.push(l);
            d.left.push(a);
            d.right.push(b);
        }
        Ok(d)
    }

    /// Node size, `□` excluded.
    pub fn nodes(&self) -> usize {
        self.labels.len()
    }

    /// Edge size, edges to `□` excluded.
    pub fn edges(&self) -> usize {
        self.left.iter().chain(&self.right).filter(|c| c.is_some()).count()
    }

    pub fn roots(&self) -> &[Option<u32>] {
        &self.roots
    }

    pub fn root(&self) -> Option<u32> {
        self.roots[0]
    }

    pub fn label(&self, v: u32) -> L {
        self.labels[v as usize]
    }

    pub fn left(&self, v: u32) -> Option<u32> {
        self.left[v as usize]
    }

    pub fn right(&self, v: u32) -> Option<u32> {
        self.right[v as usize]
    }

    /// In-degree of every node, counting root references once each.
    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.nodes()];
        for c in self.left.iter().chain(&self.right).chain(&self.roots).flatten() {
            deg[*c as usize] += 1;
        }
        deg
    }

    pub fn unfolded_sizes(&self) -> Vec<u64> {
        let mut size = vec![0u64; self.nodes()];
        for v in 0..self.nodes() {
            let mut s = 1u64;
            for c in [self.left[v], self.right[v]].into_iter().flatten() {
                s = s.saturating_add(size[c as usize]);
            }
            size[v] = s;
        }
        size
    }

    pub fn is_minimal(&self) -> bool {
        let mut b = BinaryDagBuilder::new();
        (0..self.nodes() as u32).all(|v| b.node(self.label(v), self.left(v), self.right(v)) == v)
    }
}

impl BinaryDag<Label> {
    pub fn eval_with_budget(&self, v: Option<u32>, budget: u64) -> Result<BinaryTree> {
        let Some(v) = v else { return Ok(BinaryTree::empty()) };
        let sizes = self.unfolded_sizes();
        if sizes[v as usize] > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut labels = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        // (dag node, parent slot to patch)
        let mut stack = vec![(v, None::<(usize, bool)>)];
        while let Some((u, patch)) = stack.pop() {
            let id = labels.len();
            if let Some((p, is_left)) = patch {
                if is_left {
                    left[p] = Some(id as u32);
                } else {
                    right[p] = Some(id as u32);
                }
            }
            labels.push(self.label(u));
            left.push(None);
            right.push(None);
            if let Some(r) = self.right(u) {
                stack.push((r, Some((id, false))));
            }
            if let Some(l) = self.left(u) {
                stack.push((l, Some((id, true))));
            }
        }
        BinaryTree::from_parts(&labels, &left, &right, Some(0))
    }

    pub fn eval(&self, v: Option<u32>) -> Result<BinaryTree> {
        self.eval_with_budget(v, DEFAULT_BUDGET)
    }
}

/// The minimal dag of a binary tree (`□` is shared implicitly).
pub fn minimize_binary(t: &BinaryTree) -> BinaryDag {
    minimize_binary_forest(std::slice::from_ref(t))
}

pub fn minimize_binary_forest(forest: &[BinaryTree]) -> BinaryDag {
    let mut b = BinaryDagBuilder::new();
    let mut roots = Vec::new();
    for t in forest {
        let Some(r) = t.root() else {
            roots.push(None);
            continue;
        };
        let mut id = vec![0u32; t.len()];
        let mut stack = vec![(r, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                let l = t.left(v).map(|c| id[c as usize]);
                let rr = t.right(v).map(|c| id[c as usize]);
                id[v as usize] = b.node(t.label(v), l, rr);
            } else {
                stack.push((v, true));
                if let Some(c) = t.right(v) {
                    stack.push((c, false));
                }
                if let Some(c) = t.left(v) {
                    stack.push((c, false));
                }
            }
        }
        roots.push(Some(id[r as usize]));
    }
    b.finish(roots)
}

/// A symbol in a child sequence of the reduced grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Leaf(Label),
    /// Index of a rule.
    Nt(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub label: Label,
    pub children: Vec<Symbol>,
}

/// The reduced 0-SLT grammar: one height-1 rule per non-leaf dag node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGrammar {
    rules: Vec<Rule>,
    start: u32,
    dag_node: Vec<u32>,
}

impl ReducedGrammar {
    pub fn from_dag(d: &Dag) -> Result<ReducedGrammar> {
        if d.roots().len() != 1 {
            return Err(Error::InvalidArgument("reduced grammar needs a single root".into()));
        }
        if d.is_leaf(d.root()) {
            return Err(Error::SingleNodeDag);
        }
        let mut rule_of = vec![u32::MAX; d.nodes()];
        let mut rules = Vec::new();
        let mut dag_node = Vec::new();
        for v in 0..d.nodes() as u32 {
            if d.is_leaf(v) {
                continue;
            }
            let children = d
                .children(v)
                .iter()
                .map(|&c| {
                    if d.is_leaf(c) {
                        Symbol::Leaf(d.label(c))
                    } else {
                        Symbol::Nt(rule_of[c as usize])
                    }
                })
                .collect();
            rule_of[v as usize] = rules.len() as u32;
            rules.push(Rule {
                label: d.label(v),
                children,
            });
            dag_node.push(v);
        }
        Ok(ReducedGrammar {
            start: rule_of[d.root() as usize],
            rules,
            dag_node,
        })
    }

    /// Builds a grammar from rules whose nonterminal references point to earlier rules.
    pub fn from_rules(rules: Vec<Rule>, start: u32) -> Result<ReducedGrammar> {
        for (i, r) in rules.iter().enumerate() {
            if r.children.is_empty() {
                return Err(Error::MalformedGrammar(format!("rule {i} has height 0")));
            }
            for s in &r.children {
                if let Symbol::Nt(j) = s {
                    if *j as usize >= i {
                        return Err(Error::MalformedGrammar(format!(
                            "rule {i} refers to rule {j}"
                        )));
                    }
                }
            }
        }
        if start as usize >= rules.len() {
            return Err(Error::MalformedGrammar("invalid start rule".into()));
        }
        let dag_node = (0..rules.len() as u32).collect();
        Ok(ReducedGrammar {
            rules,
            start,
            dag_node,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, i: u32) -> &Rule {
        &self.rules[i as usize]
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// Dag node id each rule came from.
    pub fn dag_node(&self, i: u32) -> u32 {
        self.dag_node[i as usize]
    }

    /// Total number of right-hand-side edges.
    pub fn edges(&self) -> usize {
        self.rules.iter().map(|r| r.children.len()).sum()
    }

    pub fn child_sequences(&self) -> impl Iterator<Item = &[Symbol]> {
        self.rules.iter().map(|r| r.children.as_slice())
    }

    /// The dag this grammar denotes (leaf labels become leaf nodes).
    pub fn to_dag(&self) -> Dag {
        let mut b = DagBuilder::new();
        let mut ids = Vec::with_capacity(self.rules.len());
        let mut buf = Vec::new();
        for r in &self.rules {
            buf.clear();
            for s in &r.children {
                buf.push(match *s {
                    Symbol::Leaf(l) => b.node(l, &[]),
                    Symbol::Nt(j) => ids[j as usize],
                });
            }
            ids.push(b.node(r.label, &buf));
        }
        let root = ids[self.start as usize];
        b.finish(vec![root])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    fn sample() -> UnrankedTree {
        parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap()
    }

    #[test]
    fn sample_dag() {
        let d = minimize(&sample());
        assert_eq!(d.edges(), 6);
        assert_eq!(d.nodes(), 4);
        assert_eq!(d.unfold().unwrap(), sample());
        assert!(d.is_minimal());
    }

    #[test]
    fn ids_are_postorder_first_appearance() {
        let d = minimize(&parse_term("f(b,c)").unwrap());
        assert_eq!(d.label(0).as_str(), "b");
        assert_eq!(d.label(1).as_str(), "c");
        assert_eq!(d.root(), 2);
    }

    #[test]
    fn reduced_grammar_sample() {
        let g = ReducedGrammar::from_dag(&minimize(&sample())).unwrap();
        assert_eq!(g.rules().len(), 3);
        assert_eq!(g.edges(), 6);
        let a = Symbol::Nt(0);
        assert_eq!(g.rule(0).children, vec![Symbol::Leaf(Label::of("a"))]);
        assert_eq!(g.rule(1).children, vec![a, a]);
        assert_eq!(g.rule(2).children, vec![Symbol::Nt(1), a, a]);
        assert_eq!(g.start(), 2);
        assert_eq!(g.to_dag(), minimize(&sample()));
    }

    #[test]
    fn single_node_has_no_reduced_grammar() {
        let d = minimize(&parse_term("a").unwrap());
        assert_eq!((d.nodes(), d.edges()), (1, 0));
        assert_eq!(ReducedGrammar::from_dag(&d), Err(Error::SingleNodeDag));
        let g = ReducedGrammar::from_dag(&minimize(&parse_term("a(a)").unwrap())).unwrap();
        assert_eq!(g.rules().len(), 1);
    }

    #[test]
    fn budget_guard() {
        // d_n: node i has two edges to node i-1
        let n = 60;
        let nodes = (0..=n)
            .map(|i| (Label::of("f"), if i == 0 { vec![] } else { vec![i - 1, i - 1] }))
            .collect();
        let d = Dag::from_nodes(nodes, vec![n]).unwrap();
        assert_eq!(d.edges(), 2 * n as usize);
        assert_eq!(d.unfold(), Err(Error::BudgetExceeded { budget: DEFAULT_BUDGET }));
    }

    #[test]
    fn forest_sharing() {
        let f = [parse_term("f(a,b)").unwrap(), parse_term("g(a,b)").unwrap()];
        let d = minimize_forest(&f);
        assert_eq!(d.nodes(), 4);
        assert_eq!(d.eval(d.roots()[1]).unwrap(), f[1]);
    }

    #[test]
    fn binary_minimize_roundtrip() {
        let b = BinaryTree::parse("f(a(□,a),a(□,a))").unwrap();
        let d = minimize_binary(&b);
        assert_eq!(d.nodes(), 3);
        assert_eq!(d.edges(), 3);
        assert_eq!(d.eval(d.root()).unwrap(), b);
    }
}
