//! Unranked and binary trees stored as preorder arenas.
//!
//! Node `0` is the root and node ids coincide with 0-based preorder
//! positions, so two trees are structurally equal iff their arenas are equal.

use std::fmt;

use crate::error::{Error, Result};
use crate::label::{Label, BOX};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnrankedTree {
    labels: Vec<Label>,
    offsets: Vec<u32>,
    kids: Vec<u32>,
    ends: Vec<u32>,
}

impl UnrankedTree {
    pub fn leaf(label: Label) -> UnrankedTree {
        UnrankedTree::from_preorder(vec![label], vec![0]).unwrap()
    }

    /// Builds `label(children...)` by concatenating the children's arenas.
    pub fn node(label: Label, children: &[UnrankedTree]) -> UnrankedTree {
        let total: usize = 1 + children.iter().map(|c| c.len()).sum::<usize>();
        let mut labels = Vec::with_capacity(total);
        let mut arities = Vec::with_capacity(total);
        labels.push(label);
        arities.push(children.len() as u32);
        for c in children {
            labels.extend_from_slice(&c.labels);
            arities.extend((0..c.len()).map(|v| c.arity(v as u32) as u32));
        }
        UnrankedTree::from_preorder(labels, arities).unwrap()
    }

    /// Builds a tree from its preorder label sequence and node arities.
    pub fn from_preorder(labels: Vec<Label>, arities: Vec<u32>) -> Result<UnrankedTree> {
        let n = labels.len();
        if n == 0 || arities.len() != n {
            return Err(Error::EmptyInput);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        for &a in &arities {
            offsets.push(acc);
            acc += a;
        }
        offsets.push(acc);
        if acc as usize != n - 1 {
            return Err(Error::MalformedGrammar(format!(
                "arities sum to {acc} but the tree has {n} nodes"
            )));
        }
        let mut kids = vec![0u32; n - 1];
        let mut ends = vec![0u32; n];
        // (node, next child slot)
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for v in 0..n as u32 {
            if let Some(top) = stack.last_mut() {
                let (p, slot) = *top;
                kids[(offsets[p as usize] + slot) as usize] = v;
                top.1 += 1;
            } else if v != 0 {
                return Err(Error::MalformedGrammar("preorder sequence is a forest".into()));
            }
            stack.push((v, 0));
            while let Some(&(p, slot)) = stack.last() {
                if slot == arities[p as usize] {
                    ends[p as usize] = v + 1;
                    stack.pop();
                } else {
                    break;
                }
            }
        }
        if !stack.is_empty() {
            return Err(Error::MalformedGrammar("preorder sequence is incomplete".into()));
        }
        Ok(UnrankedTree {
            labels,
            offsets,
            kids,
            ends,
        })
    }

    /// Number of nodes `‖t‖`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of edges `|t|`.
    pub fn edges(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn label(&self, v: u32) -> Label {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.kids[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn arity(&self, v: u32) -> usize {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    /// Exclusive end of the preorder range occupied by the subtree at `v`.
    pub fn subtree_end(&self, v: u32) -> u32 {
        self.ends[v as usize]
    }

    /// Edge size of the subtree rooted at `v`.
    pub fn subtree_edges(&self, v: u32) -> usize {
        (self.ends[v as usize] - v - 1) as usize
    }

    /// Height in edges.
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        let mut best = 0;
        for v in 0..self.len() as u32 {
            let d = depth[v as usize];
            best = best.max(d);
            for &c in self.children(v) {
                depth[c as usize] = d + 1;
            }
        }
        best
    }

    pub fn max_children(&self) -> usize {
        (0..self.len() as u32).map(|v| self.arity(v)).max().unwrap_or(0)
    }

    /// Parent of every node; the root maps to itself.
    pub fn parents(&self) -> Vec<u32> {
        let mut parent = vec![0u32; self.len()];
        for v in 0..self.len() as u32 {
            for &c in self.children(v) {
                parent[c as usize] = v;
            }
        }
        parent
    }

    /// Copies the subtree rooted at node `v` (0-based).
    pub fn subtree(&self, v: u32) -> UnrankedTree {
        let (lo, hi) = (v as usize, self.ends[v as usize] as usize);
        let labels = self.labels[lo..hi].to_vec();
        let arities = (lo..hi).map(|u| self.arity(u as u32) as u32).collect();
        UnrankedTree::from_preorder(labels, arities).unwrap()
    }

    /// `t/p` for a 1-based preorder index.
    pub fn subtree_at(&self, p: usize) -> Result<UnrankedTree> {
        self.check_index(p)?;
        Ok(self.subtree(p as u32 - 1))
    }

    /// `sibseq(p)`: the subtree at `p` followed by the subtrees of its right siblings.
    pub fn sibseq_at(&self, p: usize) -> Result<Vec<UnrankedTree>> {
        self.check_index(p)?;
        let v = p as u32 - 1;
        if v == 0 {
            return Ok(vec![self.clone()]);
        }
        let parent = self.parents()[v as usize];
        let sibs = self.children(parent);
        let at = sibs.iter().position(|&s| s == v).unwrap();
        Ok(sibs[at..].iter().map(|&s| self.subtree(s)).collect())
    }

    fn check_index(&self, p: usize) -> Result<()> {
        if p == 0 || p > self.len() {
            return Err(Error::IndexOutOfRange {
                index: p.to_string(),
                len: self.len().to_string(),
            });
        }
        Ok(())
    }

    /// Reverses every children sequence.
    pub fn mirror(&self) -> UnrankedTree {
        let mut b = TreeBuilder::new();
        // (node, opened)
        let mut stack = vec![(0u32, false)];
        while let Some((v, opened)) = stack.pop() {
            if opened {
                b.close();
                continue;
            }
            b.open(self.label(v));
            stack.push((v, true));
            for &c in self.children(v) {
                stack.push((c, false));
            }
        }
        b.finish().unwrap()
    }

    /// The children of the root as separate trees.
    pub fn root_subtrees(&self) -> Vec<UnrankedTree> {
        self.children(0).iter().map(|&c| self.subtree(c)).collect()
    }
}

impl fmt::Display for UnrankedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // (node, index of next child to print)
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        f.write_str(self.label(0).as_str())?;
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let kids = self.children(v);
            if i == kids.len() {
                if i > 0 {
                    f.write_str(")")?;
                }
                stack.pop();
                continue;
            }
            f.write_str(if i == 0 { "(" } else { "," })?;
            top.1 += 1;
            let c = kids[i];
            f.write_str(self.label(c).as_str())?;
            stack.push((c, 0));
        }
        Ok(())
    }
}

impl fmt::Debug for UnrankedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Incremental construction in document order.
#[derive(Default)]
pub struct TreeBuilder {
    labels: Vec<Label>,
    arities: Vec<u32>,
    open: Vec<usize>,
    roots: usize,
}

impl TreeBuilder {
    pub fn new() -> TreeBuilder {
        TreeBuilder::default()
    }

    pub fn open(&mut self, label: Label) {
        match self.open.last() {
            Some(&p) => self.arities[p] += 1,
            None => self.roots += 1,
        }
        self.open.push(self.labels.len());
        self.labels.push(label);
        self.arities.push(0);
    }

    /// Closes the innermost open node; returns false if none is open.
    pub fn close(&mut self) -> bool {
        self.open.pop().is_some()
    }

    pub fn depth(&self) -> usize {
        self.open.len()
    }

    pub fn roots(&self) -> usize {
        self.roots
    }

    pub fn finish(self) -> Result<UnrankedTree> {
        if self.labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !self.open.is_empty() || self.roots != 1 {
            return Err(Error::MalformedGrammar("unbalanced tree construction".into()));
        }
        UnrankedTree::from_preorder(self.labels, self.arities)
    }
}

fn is_label_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_label_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.' | b':')
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", b as char))
        }
    }

    fn label(&mut self) -> Result<Label> {
        self.skip_ws();
        let start = self.pos;
        if start >= self.text.len() || !is_label_start(self.text[start]) {
            return self.err("expected a label");
        }
        self.pos += 1;
        while self.pos < self.text.len() && is_label_char(self.text[self.pos]) {
            self.pos += 1;
        }
        Label::new(std::str::from_utf8(&self.text[start..self.pos]).unwrap())
    }

    /// Consumes the box placeholder if present.
    fn take_box(&mut self) -> bool {
        self.skip_ws();
        let b = BOX.as_bytes();
        if self.text[self.pos..].starts_with(b) {
            self.pos += b.len();
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(())
    }
}

/// Parses `t := label | label '(' t (',' t)* ')'`.
pub fn parse_term(text: &str) -> Result<UnrankedTree> {
    let mut lx = Lexer {
        text: text.as_bytes(),
        pos: 0,
    };
    if lx.peek().is_none() {
        return Err(Error::EmptyInput);
    }
    let mut b = TreeBuilder::new();
    b.open(lx.label()?);
    loop {
        match lx.peek() {
            Some(b'(') => {
                lx.pos += 1;
                b.open(lx.label()?);
                continue;
            }
            _ => {
                b.close();
            }
        }
        // after closing a node: either ',' sibling, ')' parent close, or end
        loop {
            if b.depth() == 0 {
                lx.finish()?;
                return b.finish();
            }
            match lx.peek() {
                Some(b',') => {
                    lx.pos += 1;
                    b.open(lx.label()?);
                    break;
                }
                Some(b')') => {
                    lx.pos += 1;
                    b.close();
                }
                _ => return lx.err("expected ',' or ')'"),
            }
        }
    }
}

/// Parses a whitespace- or semicolon-separated forest in term notation.
pub fn parse_forest(text: &str) -> Result<Vec<UnrankedTree>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_term)
        .collect()
}

/// A binary tree where an absent child is the placeholder `□`.
///
/// Every real node has exactly two child slots; `None` in a slot is the
/// unique representation of `□`, so structural equality is arena equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryTree {
    labels: Vec<Label>,
    left: Vec<Option<u32>>,
    right: Vec<Option<u32>>,
}

impl BinaryTree {
    /// The empty binary tree `□`.
    pub fn empty() -> BinaryTree {
        BinaryTree::default()
    }

    pub fn is_box(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn leaf(label: Label) -> BinaryTree {
        BinaryTree {
            labels: vec![label],
            left: vec![None],
            right: vec![None],
        }
    }

    pub fn node(label: Label, left: &BinaryTree, right: &BinaryTree) -> BinaryTree {
        let n = 1 + left.len() + right.len();
        let mut t = BinaryTree {
            labels: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
        };
        t.labels.push(label);
        t.left.push(if left.is_box() { None } else { Some(1) });
        let r0 = 1 + left.len() as u32;
        t.right.push(if right.is_box() { None } else { Some(r0) });
        for (part, shift) in [(left, 1u32), (right, r0)] {
            t.labels.extend_from_slice(&part.labels);
            t.left.extend(part.left.iter().map(|c| c.map(|x| x + shift)));
            t.right.extend(part.right.iter().map(|c| c.map(|x| x + shift)));
        }
        t
    }

    /// Builds a tree from arbitrary node numbering, renumbering to preorder.
    pub fn from_parts(
        labels: &[Label],
        left: &[Option<u32>],
        right: &[Option<u32>],
        root: Option<u32>,
    ) -> Result<BinaryTree> {
        let mut t = BinaryTree::empty();
        let Some(root) = root else { return Ok(t) };
        let n = labels.len();
        let mut seen = vec![false; n];
        // (old id, slot in new arena to patch: parent index and side)
        let mut stack: Vec<(u32, Option<(usize, bool)>)> = vec![(root, None)];
        while let Some((v, patch)) = stack.pop() {
            let vi = v as usize;
            if vi >= n || seen[vi] {
                return Err(Error::MalformedGrammar("binary node reused or out of range".into()));
            }
            seen[vi] = true;
            let id = t.labels.len() as u32;
            if let Some((p, is_left)) = patch {
                if is_left {
                    t.left[p] = Some(id);
                } else {
                    t.right[p] = Some(id);
                }
            }
            t.labels.push(labels[vi]);
            t.left.push(None);
            t.right.push(None);
            if let Some(r) = right[vi] {
                stack.push((r, Some((id as usize, false))));
            }
            if let Some(l) = left[vi] {
                stack.push((l, Some((id as usize, true))));
            }
        }
        Ok(t)
    }

    /// Number of real (non-`□`) nodes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of edges to real nodes.
    pub fn edges(&self) -> usize {
        self.left.iter().chain(&self.right).filter(|c| c.is_some()).count()
    }

    pub fn root(&self) -> Option<u32> {
        if self.is_box() {
            None
        } else {
            Some(0)
        }
    }

    pub fn label(&self, v: u32) -> Label {
        self.labels[v as usize]
    }

    pub fn left(&self, v: u32) -> Option<u32> {
        self.left[v as usize]
    }

    pub fn right(&self, v: u32) -> Option<u32> {
        self.right[v as usize]
    }

    /// Copies the subtree at `v`; `None` yields `□`.
    pub fn subtree(&self, v: Option<u32>) -> BinaryTree {
        let Some(v) = v else { return BinaryTree::empty() };
        BinaryTree::from_parts(&self.labels, &self.left, &self.right, Some(v)).unwrap()
    }

    /// Parses binary term notation in which `□` denotes an absent child and
    /// a bare label abbreviates `label(□,□)`.
    pub fn parse(text: &str) -> Result<BinaryTree> {
        let mut lx = Lexer {
            text: text.as_bytes(),
            pos: 0,
        };
        if lx.peek().is_none() {
            return Err(Error::EmptyInput);
        }
        let mut labels = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        // frame: (node, slots filled)
        let mut stack: Vec<(usize, u8)> = Vec::new();
        let mut root = None;
        loop {
            let item = if lx.take_box() {
                None
            } else {
                let l = lx.label()?;
                let id = labels.len();
                labels.push(l);
                left.push(None);
                right.push(None);
                Some(id)
            };
            match stack.last_mut() {
                None => root = item.map(|x| x as u32),
                Some((p, slot)) => {
                    if *slot == 0 {
                        left[*p] = item.map(|x| x as u32);
                    } else {
                        right[*p] = item.map(|x| x as u32);
                    }
                    *slot += 1;
                }
            }
            let mut descended = false;
            if let Some(id) = item {
                if lx.peek() == Some(b'(') {
                    lx.pos += 1;
                    stack.push((id, 0));
                    descended = true;
                }
            }
            if descended {
                continue;
            }
            loop {
                let Some(&(_, slot)) = stack.last() else {
                    lx.finish()?;
                    return BinaryTree::from_parts(&labels, &left, &right, root);
                };
                if slot == 1 {
                    lx.expect(b',')?;
                    break;
                }
                lx.expect(b')')?;
                stack.pop();
            }
        }
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step {
            Node(Option<u32>),
            Text(&'static str),
        }
        let mut stack = vec![Step::Node(self.root())];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(s) => f.write_str(s)?,
                Step::Node(None) => f.write_str(BOX)?,
                Step::Node(Some(v)) => {
                    f.write_str(self.label(v).as_str())?;
                    let (l, r) = (self.left(v), self.right(v));
                    if l.is_some() || r.is_some() {
                        stack.push(Step::Text(")"));
                        stack.push(Step::Node(r));
                        stack.push(Step::Text(","));
                        stack.push(Step::Node(l));
                        stack.push(Step::Text("("));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.edges(), 9);
        assert_eq!(t.to_string(), "f(f(g(a),g(a)),g(a),g(a))");
        assert_eq!(parse_term(" a ").unwrap().edges(), 0);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_term("   "), Err(Error::EmptyInput));
        assert!(matches!(parse_term("f(a,"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_term("f(a))"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_term("f()"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_term("a b"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn node_composition_matches_parse() {
        let a = UnrankedTree::leaf(Label::of("a"));
        let ga = UnrankedTree::node(Label::of("g"), &[a]);
        let t = UnrankedTree::node(Label::of("f"), &[ga.clone(), ga]);
        assert_eq!(t, parse_term("f(g(a),g(a))").unwrap());
    }

    #[test]
    fn subtrees_and_sibseqs() {
        let t = parse_term("f(a,f(b,a),b,a)").unwrap();
        assert_eq!(t.subtree_at(1).unwrap(), t);
        assert_eq!(t.subtree_at(3).unwrap().to_string(), "f(b,a)");
        let s: Vec<String> = t.sibseq_at(3).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["f(b,a)", "b", "a"]);
        assert!(t.subtree_at(0).is_err());
        assert!(t.sibseq_at(8).is_err());
        assert_eq!(t.subtree_end(2), 5);
    }

    #[test]
    fn mirror_reverses() {
        let t = parse_term("f(a,g(b,c),d)").unwrap();
        assert_eq!(t.mirror().to_string(), "f(d,g(c,b),a)");
        assert_eq!(t.height(), 2);
        assert_eq!(t.max_children(), 3);
    }

    #[test]
    fn binary_parse_print() {
        let b = BinaryTree::parse("f(a1(□,a2(□,a3)), g(b1(□,b2),□))").unwrap();
        assert_eq!(b.to_string(), "f(a1(□,a2(□,a3)),g(b1(□,b2),□))");
        assert_eq!(b.len(), 7);
        assert_eq!(b.edges(), 6);
        assert!(BinaryTree::parse("□").unwrap().is_box());
        assert!(BinaryTree::parse("f(a)").is_err());
    }
}
