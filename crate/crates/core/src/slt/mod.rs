//! Straight-line tree grammars and SL grammar-compressed dags.

mod compressed;
mod convert;
mod text;

use std::collections::HashSet;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::tree::{BinaryTree, UnrankedTree};

pub use compressed::{build_compressed_dag, parse_compressed_dag, write_compressed_dag, CompressedDag};
pub use convert::{eliminate_helpers, hdag_to_one_slt, simplify, to_one_slt};
pub use text::{parse_slt, write_slt};

/// A node label in a right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SltSym {
    T(Label),
    N(u32),
    /// Parameter `y_{i+1}`.
    Param(u32),
    Box,
}

/// A right-hand side tree stored in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Rhs {
    syms: Vec<SltSym>,
    offsets: Vec<u32>,
    kids: Vec<u32>,
}

impl Rhs {
    /// Builds a tree from its preorder symbols and arities.
    pub fn from_preorder(nodes: &[(SltSym, u32)]) -> Result<Rhs> {
        let n = nodes.len();
        let total: u64 = nodes.iter().map(|&(_, a)| a as u64).sum();
        if n == 0 || total + 1 != n as u64 {
            return Err(Error::MalformedGrammar("right-hand side is not a tree".into()));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for &(_, a) in nodes {
            offsets.push(acc);
            acc += a;
        }
        offsets.push(acc);
        let mut kids = vec![0; n - 1];
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for v in 0..n as u32 {
            if let Some(top) = stack.last_mut() {
                kids[(offsets[top.0 as usize] + top.1) as usize] = v;
                top.1 += 1;
            } else if v != 0 {
                return Err(Error::MalformedGrammar("right-hand side is a forest".into()));
            }
            stack.push((v, 0));
            while let Some(&(u, filled)) = stack.last() {
                if filled == nodes[u as usize].1 {
                    stack.pop();
                } else {
                    break;
                }
            }
        }
        Ok(Rhs { syms: nodes.iter().map(|&(s, _)| s).collect(), offsets, kids })
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn sym(&self, v: u32) -> SltSym {
        self.syms[v as usize]
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.kids[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    /// Edges to nodes other than `□`.
    pub fn size(&self) -> usize {
        self.syms[1..].iter().filter(|s| **s != SltSym::Box).count()
    }

    /// `(symbol, arity)` in preorder.
    pub fn preorder(&self) -> impl Iterator<Item = (SltSym, u32)> + '_ {
        (0..self.syms.len()).map(|v| (self.syms[v], self.offsets[v + 1] - self.offsets[v]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SltRule {
    pub name: String,
    pub rank: u32,
    pub rhs: Rhs,
}

/// An SLT grammar with a rank-0 start nonterminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SltGrammar {
    rules: Vec<SltRule>,
    start: u32,
}

/// Default cap on the number of unfolded nodes.
pub const UNFOLD_BUDGET: u64 = 50_000_000;

struct Frame {
    args: Vec<u32>,
    rule: u32,
    env: Option<Rc<Frame>>,
}

impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.env.take();
        while let Some(rc) = next {
            next = match Rc::try_unwrap(rc) {
                Ok(mut f) => f.env.take(),
                Err(_) => None,
            };
        }
    }
}

impl SltGrammar {
    /// Checks parameters, ranks and acyclicity.
    pub fn new(rules: Vec<SltRule>, start: u32) -> Result<SltGrammar> {
        let bad = |m: String| Err(Error::MalformedGrammar(m));
        let Some(s) = rules.get(start as usize) else { return bad("no start rule".into()) };
        if s.rank != 0 {
            return bad(format!("start rule {} has rank {}", s.name, s.rank));
        }
        for r in &rules {
            let mut seen = vec![false; r.rank as usize];
            for (sym, arity) in r.rhs.preorder() {
                match sym {
                    SltSym::Param(i) => {
                        if i >= r.rank || seen[i as usize] || arity != 0 {
                            return bad(format!("misplaced parameter y{} in {}", i + 1, r.name));
                        }
                        seen[i as usize] = true;
                    }
                    SltSym::Box if arity != 0 => return bad(format!("□ with children in {}", r.name)),
                    SltSym::N(x) => match rules.get(x as usize) {
                        None => return bad(format!("undefined nonterminal in {}", r.name)),
                        Some(y) if y.rank != arity => {
                            return bad(format!("{} used with {} arguments in {}", y.name, arity, r.name))
                        }
                        _ => {}
                    },
                    _ => {}
                }
            }
            if seen.iter().any(|s| !s) {
                return bad(format!("{} does not use all its parameters", r.name));
            }
        }
        let g = SltGrammar { rules, start };
        g.check_acyclic()?;
        Ok(g)
    }

    fn check_acyclic(&self) -> Result<()> {
        let n = self.rules.len();
        let mut state = vec![0u8; n];
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            state[s] = 1;
            let mut stack = vec![(s, 0usize)];
            while let Some(top) = stack.last_mut() {
                let (x, i) = *top;
                let syms = &self.rules[x].rhs.syms;
                if i == syms.len() {
                    state[x] = 2;
                    stack.pop();
                    continue;
                }
                top.1 += 1;
                if let SltSym::N(y) = syms[i] {
                    match state[y as usize] {
                        0 => {
                            state[y as usize] = 1;
                            stack.push((y as usize, 0));
                        }
                        1 => return Err(Error::CyclicGrammar(self.rules[y as usize].name.clone())),
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rules(&self) -> &[SltRule] {
        &self.rules
    }

    pub fn rule(&self, x: u32) -> &SltRule {
        &self.rules[x as usize]
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// `Σ|ρ(X)|`, edges to `□` excluded.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| r.rhs.size()).sum()
    }

    pub fn max_rank(&self) -> u32 {
        self.rules.iter().map(|r| r.rank).max().unwrap_or(0)
    }

    /// Nonterminals ordered so that every rule precedes the rules it uses.
    pub(crate) fn callers_first(&self) -> Vec<u32> {
        let n = self.rules.len();
        let mut state = vec![false; n];
        let mut post = Vec::with_capacity(n);
        for s in 0..n as u32 {
            if state[s as usize] {
                continue;
            }
            state[s as usize] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some(top) = stack.last_mut() {
                let (x, i) = *top;
                let syms = &self.rules[x as usize].rhs.syms;
                if i == syms.len() {
                    post.push(x);
                    stack.pop();
                    continue;
                }
                top.1 += 1;
                if let SltSym::N(y) = syms[i] {
                    if !state[y as usize] {
                        state[y as usize] = true;
                        stack.push((y, 0));
                    }
                }
            }
        }
        post.reverse();
        post
    }

    /// Drops rules not reachable from the start rule and renumbers the rest.
    pub fn prune(&self) -> SltGrammar {
        let mut keep = vec![false; self.rules.len()];
        keep[self.start as usize] = true;
        let mut stack = vec![self.start];
        while let Some(x) = stack.pop() {
            for &s in &self.rules[x as usize].rhs.syms {
                if let SltSym::N(y) = s {
                    if !keep[y as usize] {
                        keep[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
        }
        let mut id = vec![u32::MAX; keep.len()];
        let mut k = 0;
        for (x, &kept) in keep.iter().enumerate() {
            if kept {
                id[x] = k;
                k += 1;
            }
        }
        let rules = self
            .rules
            .iter()
            .zip(&keep)
            .filter(|(_, &kept)| kept)
            .map(|(r, _)| SltRule {
                name: r.name.clone(),
                rank: r.rank,
                rhs: Rhs {
                    syms: r
                        .rhs
                        .syms
                        .iter()
                        .map(|&s| match s {
                            SltSym::N(y) => SltSym::N(id[y as usize]),
                            s => s,
                        })
                        .collect(),
                    offsets: r.rhs.offsets.clone(),
                    kids: r.rhs.kids.clone(),
                },
            })
            .collect();
        SltGrammar { rules, start: id[self.start as usize] }
    }

    /// Derived tree in preorder as `(label, arity)`, `None` standing for `□`.
    fn derive(&self, budget: u64) -> Result<Vec<(Option<Label>, u32)>> {
        let mut out = Vec::new();
        let mut stack: Vec<(u32, u32, Option<Rc<Frame>>)> =
            vec![(self.start, 0, None)];
        while let Some((mut rule, mut node, mut env)) = stack.pop() {
            loop {
                let rhs = &self.rules[rule as usize].rhs;
                match rhs.sym(node) {
                    SltSym::N(x) => {
                        env = Some(Rc::new(Frame {
                            args: rhs.children(node).to_vec(),
                            rule,
                            env: env.take(),
                        }));
                        rule = x;
                        node = 0;
                    }
                    SltSym::Param(i) => {
                        let f = env.take().expect("validated grammar");
                        rule = f.rule;
                        node = f.args[i as usize];
                        env = f.env.clone();
                    }
                    SltSym::Box => {
                        out.push((None, 0));
                        break;
                    }
                    SltSym::T(l) => {
                        let kids = rhs.children(node);
                        out.push((Some(l), kids.len() as u32));
                        for &c in kids.iter().rev() {
                            stack.push((rule, c, env.clone()));
                        }
                        break;
                    }
                }
            }
            if out.len() as u64 > budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    /// Unfolds a grammar over binary terminals; rank-0 terminals are leaves
    /// with two `□` children.
    pub fn unfold_binary(&self, budget: u64) -> Result<BinaryTree> {
        let nodes = self.derive(budget)?;
        let mut labels = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        // (binary node, children seen so far)
        let mut open: Vec<(u32, u32)> = Vec::new();
        let mut root = None;
        for (l, arity) in nodes {
            let id = match l {
                None => None,
                Some(l) => {
                    if arity != 0 && arity != 2 {
                        return Err(Error::MalformedGrammar(format!(
                            "terminal {l} has {arity} children in a binary grammar"
                        )));
                    }
                    labels.push(l);
                    left.push(None);
                    right.push(None);
                    Some(labels.len() as u32 - 1)
                }
            };
            match open.last_mut() {
                None => root = id,
                Some((p, seen)) => {
                    if *seen == 0 {
                        left[*p as usize] = id;
                    } else {
                        right[*p as usize] = id;
                    }
                    *seen += 1;
                }
            }
            if let (Some(v), 2) = (id, arity) {
                open.push((v, 0));
            }
            while open.last().is_some_and(|&(_, s)| s == 2) {
                open.pop();
            }
        }
        BinaryTree::from_parts(&labels, &left, &right, root)
    }

    /// Unfolds a grammar to an unranked tree; `□` is not allowed.
    pub fn unfold_unranked(&self, budget: u64) -> Result<UnrankedTree> {
        let nodes = self.derive(budget)?;
        let mut labels = Vec::with_capacity(nodes.len());
        let mut arities = Vec::with_capacity(nodes.len());
        for (l, a) in nodes {
            let Some(l) = l else {
                return Err(Error::MalformedGrammar("□ in an unranked derivation".into()));
            };
            labels.push(l);
            arities.push(a);
        }
        UnrankedTree::from_preorder(labels, arities)
    }

    /// Names must be unique for the text format.
    pub(crate) fn has_unique_names(&self) -> bool {
        let mut seen = HashSet::new();
        self.rules.iter().all(|r| seen.insert(r.name.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    fn two_parameter_grammar() -> SltGrammar {
        parse_slt(
            "S -> B(a,b,B(c,d,a))\n\
             B(y1,y2,y3) -> A(y1,A(y2,y3))\n\
             A(y1,y2) -> f(g(y1),y2)\n",
        )
        .unwrap()
    }

    #[test]
    fn parameter_grammar_unfolds() {
        let want = parse_term("f(g(a),f(g(b),f(g(c),f(g(d),a))))").unwrap();
        let g = two_parameter_grammar();
        assert_eq!(g.unfold_unranked(UNFOLD_BUDGET).unwrap(), want);
        assert_eq!(g.size(), 13);
    }

    #[test]
    fn smaller_equivalent_grammar() {
        let g = parse_slt(
            "S -> A(a,A(b,A(c,A(d,a))))\n\
             A(y1,y2) -> f(g(y1),y2)\n",
        )
        .unwrap();
        assert_eq!(g.size(), 8 + 3);
        assert_eq!(g.unfold_unranked(UNFOLD_BUDGET).unwrap(), two_parameter_grammar().unfold_unranked(100).unwrap());
    }

    #[test]
    fn single_rule() {
        let g = parse_slt("S -> a\n").unwrap();
        assert_eq!(g.unfold_unranked(10).unwrap(), parse_term("a").unwrap());
        assert_eq!(g.size(), 0);
    }

    #[test]
    fn malformed_rejected() {
        for text in [
            "S -> A(a)\nA(y1,y2) -> f(y1,y2)\n",
            "S -> A(a)\nA(y1) -> f(y1,y1)\n",
            "S -> A(a)\nA(y1) -> f(b)\n",
            "S -> A\nA -> B\nB -> A\n",
            "S(y1) -> y1\n",
            "S -> f(y1)\n",
        ] {
            assert!(parse_slt(text).is_err(), "{text}");
        }
    }

    #[test]
    fn budget_guard() {
        let mut text = String::from("S -> A1\n");
        for i in 1..40 {
            text.push_str(&format!("A{i} -> f(A{},A{})\n", i + 1, i + 1));
        }
        text.push_str("A40 -> a\n");
        let g = parse_slt(&text).unwrap();
        assert_eq!(g.unfold_unranked(1000), Err(Error::BudgetExceeded { budget: 1000 }));
    }

    #[test]
    fn binary_unfolding() {
        let g = parse_slt("S -> f(X(a),_)\nX(y1) -> g(_,y1)\n").unwrap();
        assert_eq!(g.unfold_binary(10).unwrap(), BinaryTree::parse("f(g(□,a),□)").unwrap());
    }
}
