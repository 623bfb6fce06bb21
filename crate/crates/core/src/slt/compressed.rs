//! SL grammar-compressed dags: a dag whose child sequences are words over
//! dag nodes and the nonterminals of an SL string grammar.

use std::collections::HashMap;
use std::fmt::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dag::{minimize, Dag, DagBuilder, Symbol};
use crate::error::{Error, Result};
use crate::hybrid::{HybridDag, Orientation};
use crate::label::Label;
use crate::slstring::{repair, GSym, SlGrammar};
use crate::syntax::{escape, lines, reference, Cursor};
use crate::tree::UnrankedTree;

/// `D = (V, γ, λ, G)`; `GSym::T(v)` denotes the node `v ∈ V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedDag {
    labels: Vec<Label>,
    gamma: Vec<Vec<GSym>>,
    grammar: SlGrammar,
    root: u32,
}

impl CompressedDag {
    /// Validates references and that the node/nonterminal graph is acyclic.
    pub fn new(labels: Vec<Label>, gamma: Vec<Vec<GSym>>, grammar: SlGrammar, root: u32) -> Result<CompressedDag> {
        let bad = |m: &str| Err(Error::MalformedGrammar(m.into()));
        let nv = labels.len();
        if gamma.len() != nv || root as usize >= nv {
            return bad("node tables disagree");
        }
        let in_range = |s: &GSym| match *s {
            GSym::T(v) => (v as usize) < nv,
            GSym::N(x) => (x as usize) < grammar.len(),
        };
        if !gamma.iter().chain(grammar.rules()).all(|w| w.iter().all(in_range)) {
            return bad("reference out of range");
        }
        let d = CompressedDag { labels, gamma, grammar, root };
        d.postorder_all()?;
        Ok(d)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, v: u32) -> Label {
        self.labels[v as usize]
    }

    pub fn gamma(&self, v: u32) -> &[GSym] {
        &self.gamma[v as usize]
    }

    pub fn grammar(&self) -> &SlGrammar {
        &self.grammar
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// `|V|`.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// `|N|`.
    pub fn nonterminal_count(&self) -> usize {
        self.grammar.len()
    }

    /// `|D| = |G| + Σ|γ(v)|`.
    pub fn size(&self) -> usize {
        self.grammar.size() + self.gamma.iter().map(Vec::len).sum::<usize>()
    }

    /// `ρ(X) ∈ V*N ∪ V⁺` and `γ(v) ∈ V*N ∪ V*`.
    pub fn is_right_regular(&self) -> bool {
        let ok = |w: &Vec<GSym>| {
            w.iter().rev().skip(1).all(|s| matches!(s, GSym::T(_)))
        };
        self.gamma.iter().all(ok) && self.grammar.rules().iter().all(|w| !w.is_empty() && ok(w))
    }

    fn successors(&self, u: usize) -> &[GSym] {
        let nv = self.labels.len();
        if u < nv {
            &self.gamma[u]
        } else {
            self.grammar.rule((u - nv) as u32)
        }
    }

    fn index(&self, s: GSym) -> usize {
        match s {
            GSym::T(v) => v as usize,
            GSym::N(x) => self.labels.len() + x as usize,
        }
    }

    /// Post-order over nodes and nonterminals from `seeds`; fails on a cycle.
    fn postorder(&self, seeds: impl Iterator<Item = usize>) -> Result<Vec<usize>> {
        let total = self.labels.len() + self.grammar.len();
        let mut state = vec![0u8; total];
        let mut order = Vec::with_capacity(total);
        for s in seeds {
            if state[s] != 0 {
                continue;
            }
            state[s] = 1;
            let mut stack = vec![(s, 0usize)];
            while let Some(top) = stack.last_mut() {
                let (u, i) = *top;
                let Some(&sym) = self.successors(u).get(i) else {
                    state[u] = 2;
                    order.push(u);
                    stack.pop();
                    continue;
                };
                top.1 += 1;
                let w = self.index(sym);
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Err(Error::CyclicGrammar(format!("node {w}"))),
                    _ => {}
                }
            }
        }
        Ok(order)
    }

    fn postorder_all(&self) -> Result<Vec<usize>> {
        let total = self.labels.len() + self.grammar.len();
        self.postorder(std::iter::once(self.root as usize).chain(0..total))
    }

    /// `γ'(v) = eval_G(γ(v))`.
    pub fn expanded_children(&self, v: u32, budget: u64) -> Result<Vec<u32>> {
        self.grammar.expand(&self.gamma[v as usize], budget)
    }

    /// The expanded dag `d`, hash-consed, restricted to nodes reachable from
    /// the root, with the dag id of every reachable node.
    pub fn to_dag_with_budget(&self, budget: u64) -> Result<(Dag, Vec<Option<u32>>)> {
        let len = self.grammar.lengths();
        let mut spent = BigUint::default();
        let mut b = DagBuilder::new();
        let mut id: Vec<Option<u32>> = vec![None; self.labels.len()];
        let nv = self.labels.len();
        for u in self.postorder(std::iter::once(self.root as usize))? {
            if u >= nv {
                continue;
            }
            for s in &self.gamma[u] {
                match *s {
                    GSym::T(_) => spent += 1u32,
                    GSym::N(x) => spent += &len[x as usize],
                }
            }
            if spent > BigUint::from(budget) {
                return Err(Error::BudgetExceeded { budget });
            }
            let kids: Vec<u32> = self
                .grammar
                .expand(&self.gamma[u], budget)?
                .into_iter()
                .map(|c| id[c as usize].expect("children come first"))
                .collect();
            id[u] = Some(b.node(self.labels[u], &kids));
        }
        let root = id[self.root as usize].unwrap();
        Ok((b.finish(vec![root]), id))
    }

    /// True iff `d` is the minimal dag of `eval(D)`: every node is reachable
    /// from the root and no two nodes unfold to the same tree.
    pub fn is_minimal(&self, budget: u64) -> Result<bool> {
        let (d, id) = self.to_dag_with_budget(budget)?;
        Ok(id.iter().all(Option::is_some) && d.nodes() == self.labels.len())
    }

    pub fn unfold(&self, budget: u64) -> Result<UnrankedTree> {
        let (d, _) = self.to_dag_with_budget(budget)?;
        d.eval_with_budget(d.root(), budget)
    }

    /// Total length of all expanded child sequences, i.e. the edges of `d`.
    pub fn expanded_edges(&self) -> BigUint {
        self.gamma.iter().map(|w| self.grammar.word_length(w)).sum()
    }
}

/// Child sequences of the minimal dag, in order of first appearance in a
/// preorder walk from the root, compressed together with RePair.
pub fn build_compressed_dag(t: &UnrankedTree) -> CompressedDag {
    let d = minimize(t);
    let n = d.nodes();
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut stack = vec![d.root()];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v as usize], true) {
            continue;
        }
        if !d.is_leaf(v) {
            order.push(v);
        }
        stack.extend(d.children(v).iter().rev().filter(|&&c| !seen[c as usize]));
    }
    let words: Vec<Vec<GSym>> =
        order.iter().map(|&v| d.children(v).iter().map(|&c| GSym::T(c)).collect()).collect();
    let (grammar, words) = repair(&words);
    let mut gamma = vec![Vec::new(); n];
    for (v, w) in order.into_iter().zip(words) {
        gamma[v as usize] = w;
    }
    let labels = (0..n as u32).map(|v| d.label(v)).collect();
    CompressedDag { labels, gamma, grammar, root: d.root() }
}

impl HybridDag {
    /// The hdag as a compressed dag: rules and leaf labels become nodes and
    /// every shared chain node becomes a nonterminal. Fcns hdags give a
    /// right-regular grammar, lcps hdags a left-regular one.
    pub fn to_compressed_dag(&self) -> CompressedDag {
        let indeg = self.shared().in_degrees();
        self.cut_chains(|v| indeg[v as usize] >= 2)
    }

    /// Right-regular form with `ρ(X) ∈ VN ∪ V` and `γ(v) ∈ N ∪ {ε}`: every
    /// chain node becomes a nonterminal. Only defined for fcns hdags.
    pub fn normalize_right_regular(&self) -> Result<CompressedDag> {
        if self.orientation() != Orientation::Fcns {
            return Err(Error::NotRightRegular);
        }
        Ok(self.cut_chains(|_| true))
    }

    fn cut_chains(&self, cut: impl Fn(u32) -> bool) -> CompressedDag {
        let rules = self.rule_count();
        let mut labels: Vec<Label> = (0..rules as u32)
            .map(|i| match self.shared().label(self.rule_root(i)) {
                crate::hybrid::HLabel::Root { label, .. } => label,
                _ => unreachable!(),
            })
            .collect();
        let mut leaf: HashMap<Label, u32> = HashMap::new();
        let mut nt: HashMap<u32, u32> = HashMap::new();
        let mut cut_order = Vec::new();
        let mut visited = vec![false; self.shared().nodes()];
        let mut stack: Vec<u32> = Vec::new();
        let seeds = std::iter::once(self.start()).chain(0..rules as u32);
        for r in seeds {
            stack.extend(self.rule_chain(r));
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut visited[v as usize], true) {
                    continue;
                }
                if cut(v) {
                    nt.insert(v, cut_order.len() as u32);
                    cut_order.push(v);
                }
                match self.symbol(v) {
                    Symbol::Nt(i) => stack.extend(self.rule_chain(i)),
                    Symbol::Leaf(l) => {
                        leaf.entry(l).or_insert_with(|| {
                            labels.push(l);
                            labels.len() as u32 - 1
                        });
                    }
                }
                stack.extend(self.chain_next(v));
            }
        }
        let sym = |v: u32| match self.symbol(v) {
            Symbol::Nt(i) => GSym::T(i),
            Symbol::Leaf(l) => GSym::T(leaf[&l]),
        };
        let lcps = self.orientation() == Orientation::Lcps;
        let word = |mut syms: Vec<GSym>, mut cur: Option<u32>| {
            let mut tail = None;
            while let Some(v) = cur {
                if cut(v) {
                    tail = Some(GSym::N(nt[&v]));
                    break;
                }
                syms.push(sym(v));
                cur = self.chain_next(v);
            }
            if lcps {
                syms.reverse();
                syms.splice(0..0, tail);
            } else {
                syms.extend(tail);
            }
            syms
        };
        let mut gamma: Vec<Vec<GSym>> = (0..rules as u32).map(|i| word(Vec::new(), self.rule_chain(i))).collect();
        gamma.resize(labels.len(), Vec::new());
        let rho = cut_order.iter().map(|&x| word(vec![sym(x)], self.chain_next(x))).collect();
        let grammar = SlGrammar::new(rho).expect("hdag chains are acyclic");
        CompressedDag::new(labels, gamma, grammar, self.start()).expect("valid hdag")
    }
}

/// Writes `A<k> -> label(items)` lines for nodes with a non-empty child
/// word (the root first, then descending) and `R<k> -> items` lines for the
/// string grammar. Nodes with an empty child word are written inline.
pub fn write_compressed_dag(d: &CompressedDag) -> String {
    let inline = |v: u32| d.gamma(v).is_empty();
    if inline(d.root()) {
        return format!("{}\n", escape(d.label(d.root()).as_str()));
    }
    let mut name = vec![0u32; d.node_count()];
    let mut k = 0;
    let order = d.postorder_all().expect("validated");
    for &u in &order {
        if u < d.node_count() && !inline(u as u32) {
            k += 1;
            name[u] = k;
        }
    }
    let item = |out: &mut String, s: GSym| match s {
        GSym::N(x) => write!(out, "R{}", x + 1).unwrap(),
        GSym::T(v) if inline(v) => out.push_str(&escape(d.label(v).as_str())),
        GSym::T(v) => write!(out, "A{}", name[v as usize]).unwrap(),
    };
    let mut nodes: Vec<u32> = (0..d.node_count() as u32).filter(|&v| !inline(v) && v != d.root()).collect();
    nodes.sort_by_key(|&v| std::cmp::Reverse(name[v as usize]));
    nodes.insert(0, d.root());
    let mut out = String::new();
    for v in nodes {
        write!(out, "A{} -> {}(", name[v as usize], escape(d.label(v).as_str())).unwrap();
        for (i, &s) in d.gamma(v).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            item(&mut out, s);
        }
        out.push_str(")\n");
    }
    for (x, w) in d.grammar().rules().iter().enumerate() {
        write!(out, "R{} ->", x + 1).unwrap();
        for &s in w {
            out.push(' ');
            item(&mut out, s);
        }
        out.push('\n');
    }
    out
}

enum Item {
    Node(u32),
    Nt(u32),
    Leaf(Label),
}

fn read_item(cur: &mut Cursor) -> Result<Item> {
    let (text, escaped) = cur.ident()?;
    if let Some(k) = reference(&text, escaped, "A") {
        return if k == 0 { cur.err("A0 is not a node name") } else { Ok(Item::Node(k)) };
    }
    if let Some(k) = reference(&text, escaped, "R") {
        return if k == 0 { cur.err("R0 is not a rule name") } else { Ok(Item::Nt(k - 1)) };
    }
    Ok(Item::Leaf(Label::new(&text)?))
}

/// Parses the format of [`write_compressed_dag`].
pub fn parse_compressed_dag(text: &str) -> Result<CompressedDag> {
    let mut node_lines: Vec<(u32, Label, Vec<Item>)> = Vec::new();
    let mut rule_lines: Vec<Vec<Item>> = Vec::new();
    let mut bare: Option<Label> = None;
    for (offset, line) in lines(text) {
        let mut cur = Cursor::new(line, offset)?;
        if bare.is_some() {
            return cur.err("a single-node dag has one line");
        }
        let (head, escaped) = cur.ident()?;
        if cur.at_end() && node_lines.is_empty() && rule_lines.is_empty() {
            bare = Some(Label::new(&head)?);
            continue;
        }
        if let Some(k) = reference(&head, escaped, "R") {
            if k as usize != rule_lines.len() + 1 {
                return cur.err(format!("expected R{}", rule_lines.len() + 1));
            }
            cur.expect_arrow()?;
            let mut items = Vec::new();
            while !cur.at_end() {
                items.push(read_item(&mut cur)?);
            }
            rule_lines.push(items);
            continue;
        }
        let Some(k) = reference(&head, escaped, "A").filter(|&k| k > 0) else {
            return cur.err("expected a rule");
        };
        if !rule_lines.is_empty() {
            return cur.err("node rules must precede string rules");
        }
        cur.expect_arrow()?;
        let (label, esc) = cur.ident()?;
        if !esc && (label == "_" || label == "->") {
            return cur.err("invalid label");
        }
        let label = Label::new(&label)?;
        cur.expect('(')?;
        let mut items = Vec::new();
        if !cur.eat(')') {
            loop {
                items.push(read_item(&mut cur)?);
                if cur.eat(')') {
                    break;
                }
                cur.expect(',')?;
            }
        }
        cur.finish()?;
        node_lines.push((k, label, items));
    }
    if let Some(l) = bare {
        return CompressedDag::new(vec![l], vec![Vec::new()], SlGrammar::empty(), 0);
    }
    if node_lines.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut labels = Vec::new();
    let mut by_name: HashMap<u32, u32> = HashMap::new();
    for (k, l, _) in &node_lines {
        if by_name.insert(*k, labels.len() as u32).is_some() {
            return Err(Error::MalformedGrammar(format!("A{k} defined twice")));
        }
        labels.push(*l);
    }
    let mut leaves: HashMap<Label, u32> = HashMap::new();
    let nrules = rule_lines.len();
    let mut resolve = |items: Vec<Item>, labels: &mut Vec<Label>| -> Result<Vec<GSym>> {
        items
            .into_iter()
            .map(|it| match it {
                Item::Node(k) => by_name
                    .get(&k)
                    .map(|&v| GSym::T(v))
                    .ok_or_else(|| Error::MalformedGrammar(format!("A{k} is not defined"))),
                Item::Nt(x) if (x as usize) < nrules => Ok(GSym::N(x)),
                Item::Nt(x) => Err(Error::MalformedGrammar(format!("R{} is not defined", x + 1))),
                Item::Leaf(l) => Ok(GSym::T(*leaves.entry(l).or_insert_with(|| {
                    labels.push(l);
                    labels.len() as u32 - 1
                }))),
            })
            .collect()
    };
    let mut gamma = Vec::new();
    for (_, _, items) in node_lines {
        gamma.push(resolve(items, &mut labels)?);
    }
    let mut rules = Vec::new();
    for items in rule_lines {
        rules.push(resolve(items, &mut labels)?);
    }
    gamma.resize(labels.len(), Vec::new());
    CompressedDag::new(labels, gamma, SlGrammar::new(rules)?, 0)
}

impl CompressedDag {
    /// Size of the largest expanded child sequence, saturating.
    pub fn max_children(&self) -> u64 {
        self.gamma
            .iter()
            .map(|w| self.grammar.word_length(w).to_u64().unwrap_or(u64::MAX))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;
    use GSym::{N, T};

    pub(crate) fn repeated_words_tree() -> UnrankedTree {
        parse_term("f(a,g(a,a,a),h(a,a,b),f(g(a,a,a),h(a,a,b)),g(a,a,a),h(a,a,b),c)").unwrap()
    }

    #[test]
    fn repeated_child_words() {
        let t = repeated_words_tree();
        let d = build_compressed_dag(&t);
        assert_eq!(d.size(), 14);
        assert_eq!(d.nonterminal_count(), 2);
        let id = |s: &str| d.labels().iter().position(|l| l.as_str() == s).unwrap() as u32;
        let (a, b, c) = (id("a"), id("b"), id("c"));
        let a2 = id("g");
        let a3 = id("h");
        assert_eq!(d.grammar().rules(), &[vec![T(a2), T(a3)], vec![T(a), T(a)]]);
        let root = d.root();
        let a4 = (0..d.node_count() as u32).find(|&v| v != root && d.label(v).as_str() == "f").unwrap();
        assert_eq!(d.gamma(root), &[T(a), N(0), T(a4), N(0), T(c)]);
        assert_eq!(d.gamma(a2), &[N(1), T(a)]);
        assert_eq!(d.gamma(a3), &[N(1), T(b)]);
        assert_eq!(d.gamma(a4), &[N(0)]);
        assert!(d.is_minimal(1000).unwrap());
        assert_eq!(d.unfold(1000).unwrap(), t);
        assert_eq!(d.expanded_edges(), BigUint::from(minimize(&t).edges()));
    }

    #[test]
    fn doubling() {
        let n = 10;
        let t = UnrankedTree::node(Label::of("f"), &vec![UnrankedTree::leaf(Label::of("a")); 1 << n]);
        let d = build_compressed_dag(&t);
        assert_eq!(d.size(), 2 * n);
        assert_eq!(d.unfold(1 << 20).unwrap(), t);
    }

    #[test]
    fn distinct_children_need_no_grammar() {
        let t = parse_term("f(a,b,g(c))").unwrap();
        let d = build_compressed_dag(&t);
        assert!(d.grammar().is_empty());
        assert_eq!(d.size(), minimize(&t).edges());
    }

    #[test]
    fn hdag_views() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let h = HybridDag::build(&t, Orientation::Fcns).unwrap();
        let d = h.to_compressed_dag();
        assert!(d.is_right_regular());
        assert_eq!(d.size(), h.edges() + d.nonterminal_count());
        assert_eq!(d.unfold(100).unwrap(), t);
        assert!(d.is_minimal(100).unwrap());

        let r = h.normalize_right_regular().unwrap();
        assert_eq!(r.unfold(100).unwrap(), t);
        assert_eq!(r.nonterminal_count(), 4);
        // S -> f(X0), X0 -> B X1, X1 -> A X2, X2 -> A, X3 -> C
        let (s, bb, aa) = (h.start(), 1, 0);
        let cc = 3;
        assert_eq!(r.gamma(s), &[N(0)]);
        assert_eq!(r.grammar().rules(), &[
            vec![T(bb), N(1)],
            vec![T(aa), N(2)],
            vec![T(aa)],
            vec![T(cc)],
        ]);
        assert_eq!(r.gamma(bb), &[N(1)]);
        assert_eq!(r.gamma(aa), &[N(3)]);
        assert!(r.gamma(cc).is_empty());

        let l = HybridDag::build(&t, Orientation::Lcps).unwrap().to_compressed_dag();
        assert_eq!(l.unfold(100).unwrap(), t);
        assert!(HybridDag::build(&t, Orientation::Lcps).unwrap().normalize_right_regular().is_err());
    }

    #[test]
    fn text_roundtrip() {
        let d = build_compressed_dag(&repeated_words_tree());
        let s = write_compressed_dag(&d);
        assert_eq!(
            s,
            "A4 -> f(a,R1,A3,R1,c)\nA3 -> f(R1)\nA2 -> h(R2,b)\nA1 -> g(R2,a)\nR1 -> A1 A2\nR2 -> a a\n"
        );
        let e = parse_compressed_dag(&s).unwrap();
        assert_eq!(e.size(), 14);
        assert_eq!(e.unfold(1000).unwrap(), repeated_words_tree());
        assert_eq!(write_compressed_dag(&e), s);
        let single = parse_compressed_dag("a\n").unwrap();
        assert_eq!(write_compressed_dag(&single), "a\n");
    }

    #[test]
    fn rejects_cycles_and_bad_refs() {
        assert!(parse_compressed_dag("A1 -> f(R1)\nR1 -> A1\n").is_err());
        assert!(parse_compressed_dag("A1 -> f(A2)\n").is_err());
        assert!(parse_compressed_dag("A1 -> f(R2)\nR1 -> a\n").is_err());
    }
}
