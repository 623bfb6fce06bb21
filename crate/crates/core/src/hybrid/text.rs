//! Hybrid dag rule format.
//!
//! One line `A<k>:f(left,right)` per rule with the start rule first, then
//! `H<j> -> …` lines for sequence nodes reached from more than one place.
//! Sequence nodes are written `A<k>` or a leaf label, followed by
//! `(left,right)` unless both slots are `_`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use super::{HLabel, HybridDag, Orientation};
use crate::dag::{BinaryDagBuilder, Symbol};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::syntax::{escape, lines, reference, Cursor};

struct Writer<'a> {
    h: &'a HybridDag,
    shared_name: Vec<u32>,
    indeg: Vec<u32>,
    queue: VecDeque<u32>,
    next: u32,
}

impl Writer<'_> {
    fn sym(&self, s: Symbol) -> String {
        match s {
            Symbol::Nt(j) => format!("A{}", j + 1),
            Symbol::Leaf(l) => escape(l.as_str()).into_owned(),
        }
    }

    /// Writes the subtree at `v`; shared nodes become references unless `inline_top`.
    fn item(&mut self, out: &mut String, v: Option<u32>, inline_top: bool) {
        enum Step {
            Node(Option<u32>, bool),
            Text(&'static str),
        }
        let d = self.h.shared();
        let mut stack = vec![Step::Node(v, inline_top)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(s) => out.push_str(s),
                Step::Node(None, _) => out.push('_'),
                Step::Node(Some(u), inline) => {
                    if !inline && self.indeg[u as usize] >= 2 {
                        if self.shared_name[u as usize] == 0 {
                            self.next += 1;
                            self.shared_name[u as usize] = self.next;
                            self.queue.push_back(u);
                        }
                        write!(out, "H{}", self.shared_name[u as usize]).unwrap();
                        continue;
                    }
                    out.push_str(&self.sym(self.h.symbol(u)));
                    let (l, r) = (d.left(u), d.right(u));
                    if l.is_some() || r.is_some() {
                        stack.push(Step::Text(")"));
                        stack.push(Step::Node(r, false));
                        stack.push(Step::Text(","));
                        stack.push(Step::Node(l, false));
                        stack.push(Step::Text("("));
                    }
                }
            }
        }
    }
}

pub fn write_hybrid(h: &HybridDag) -> String {
    let d = h.shared();
    let mut w = Writer {
        h,
        shared_name: vec![0; d.nodes()],
        indeg: d.in_degrees(),
        queue: VecDeque::new(),
        next: 0,
    };
    let n = h.rule_count() as u32;
    let mut order: Vec<u32> = (0..n).rev().filter(|&i| i != h.start()).collect();
    order.insert(0, h.start());
    let mut out = String::new();
    for i in order {
        let root = h.rule_root(i);
        let HLabel::Root { label, .. } = d.label(root) else { unreachable!() };
        write!(out, "A{}:{}(", i + 1, escape(label.as_str())).unwrap();
        w.item(&mut out, d.left(root), false);
        out.push(',');
        w.item(&mut out, d.right(root), false);
        out.push_str(")\n");
    }
    while let Some(u) = w.queue.pop_front() {
        write!(out, "H{} -> ", w.shared_name[u as usize]).unwrap();
        w.item(&mut out, Some(u), true);
        out.push('\n');
    }
    out
}

/// A parsed binary item before hash-consing.
enum Raw {
    Box,
    Shared(u32),
    Node(Symbol, Box<(Raw, Raw)>),
}

fn symbol(text: String, escaped: bool) -> Result<Symbol> {
    match reference(&text, escaped, "A") {
        Some(0) => Err(Error::MalformedGrammar("A0 is not a rule name".into())),
        Some(k) => Ok(Symbol::Nt(k - 1)),
        None => Ok(Symbol::Leaf(Label::new(&text)?)),
    }
}

fn raw_item(cur: &mut Cursor) -> Result<Raw> {
    // frames: symbol and the left item once parsed
    let mut stack: Vec<(Symbol, Option<Raw>)> = Vec::new();
    loop {
        let (text, escaped) = cur.ident()?;
        let mut done = if !escaped && text == "_" {
            Raw::Box
        } else if let Some(j) = reference(&text, escaped, "H") {
            Raw::Shared(j)
        } else {
            let s = symbol(text, escaped)?;
            if cur.eat('(') {
                stack.push((s, None));
                continue;
            }
            Raw::Node(s, Box::new((Raw::Box, Raw::Box)))
        };
        loop {
            let Some(top) = stack.last_mut() else { return Ok(done) };
            if top.1.is_none() {
                top.1 = Some(done);
                cur.expect(',')?;
                break;
            }
            cur.expect(')')?;
            let (s, left) = stack.pop().unwrap();
            done = Raw::Node(s, Box::new((left.unwrap(), done)));
        }
    }
}

struct Resolver {
    b: BinaryDagBuilder<HLabel>,
    done: HashMap<u32, u32>,
}

impl Resolver {
    /// Hash-conses an item whose shared references are all resolved already.
    fn resolve(&mut self, r: &Raw) -> Result<Option<u32>> {
        enum Step<'a> {
            Visit(&'a Raw),
            Build(Symbol),
        }
        let mut out: Vec<Option<u32>> = Vec::new();
        let mut stack = vec![Step::Visit(r)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Visit(Raw::Box) => out.push(None),
                Step::Visit(Raw::Shared(j)) => match self.done.get(j) {
                    Some(&id) => out.push(Some(id)),
                    None => return Err(Error::MalformedGrammar(format!("undefined H{j}"))),
                },
                Step::Visit(Raw::Node(s, kids)) => {
                    stack.push(Step::Build(*s));
                    stack.push(Step::Visit(&kids.1));
                    stack.push(Step::Visit(&kids.0));
                }
                Step::Build(s) => {
                    let r = out.pop().unwrap();
                    let l = out.pop().unwrap();
                    out.push(Some(self.b.node(HLabel::Sym(s), l, r)));
                }
            }
        }
        Ok(out.pop().unwrap())
    }
}

fn shared_refs(r: &Raw, out: &mut Vec<u32>) {
    let mut stack = vec![r];
    while let Some(r) = stack.pop() {
        match r {
            Raw::Shared(j) => out.push(*j),
            Raw::Node(_, kids) => {
                stack.push(&kids.0);
                stack.push(&kids.1);
            }
            Raw::Box => {}
        }
    }
}

/// Definitions of shared nodes ordered so that references come first.
fn shared_order(defs: &HashMap<u32, Raw>) -> Result<Vec<u32>> {
    let mut keys: Vec<u32> = defs.keys().copied().collect();
    keys.sort_unstable();
    let mut state: HashMap<u32, u8> = HashMap::new();
    let mut order = Vec::new();
    for k in keys {
        if state.contains_key(&k) {
            continue;
        }
        let mut stack = vec![(k, false)];
        while let Some((j, done)) = stack.pop() {
            if done {
                state.insert(j, 2);
                order.push(j);
                continue;
            }
            match state.get(&j) {
                Some(2) => continue,
                Some(_) => return Err(Error::CyclicGrammar(format!("H{j}"))),
                None => {}
            }
            let Some(def) = defs.get(&j) else {
                return Err(Error::MalformedGrammar(format!("undefined H{j}")));
            };
            state.insert(j, 1);
            stack.push((j, true));
            let mut refs = Vec::new();
            shared_refs(def, &mut refs);
            for c in refs {
                match state.get(&c) {
                    Some(1) => return Err(Error::CyclicGrammar(format!("H{c}"))),
                    Some(_) => {}
                    None => stack.push((c, false)),
                }
            }
        }
    }
    Ok(order)
}

fn drop_raw(r: Raw) {
    // iterative drop for long chains
    let mut stack = vec![r];
    while let Some(r) = stack.pop() {
        if let Raw::Node(_, kids) = r {
            let (a, b) = *kids;
            stack.push(a);
            stack.push(b);
        }
    }
}

pub fn parse_hybrid(text: &str, orientation: Orientation) -> Result<HybridDag> {
    let mut roots: Vec<(u32, Label, Raw, Raw)> = Vec::new();
    let mut defs: HashMap<u32, Raw> = HashMap::new();
    for (offset, line) in lines(text) {
        let mut cur = Cursor::new(line, offset)?;
        let (name, escaped) = cur.ident()?;
        if let Some(j) = reference(&name, escaped, "H") {
            cur.expect_arrow()?;
            let item = raw_item(&mut cur)?;
            cur.finish()?;
            if defs.insert(j, item).is_some() {
                return cur.err(format!("H{j} defined twice"));
            }
            continue;
        }
        let Some(k) = reference(&name, escaped, "A").filter(|&k| k > 0) else {
            return cur.err("expected A<k>: or H<j> ->");
        };
        cur.expect(':')?;
        let (l, _) = cur.ident()?;
        cur.expect('(')?;
        let left = raw_item(&mut cur)?;
        cur.expect(',')?;
        let right = raw_item(&mut cur)?;
        cur.expect(')')?;
        cur.finish()?;
        roots.push((k - 1, Label::new(&l)?, left, right));
    }
    if roots.is_empty() {
        return Err(Error::EmptyInput);
    }
    let start = roots[0].0;
    let n = roots.len() as u32;
    let mut slots: Vec<Option<u32>> = vec![None; roots.len()];
    let mut res = Resolver {
        b: BinaryDagBuilder::new(),
        done: HashMap::new(),
    };
    for j in shared_order(&defs)? {
        let def = defs.remove(&j).unwrap();
        let Some(id) = res.resolve(&def)? else {
            return Err(Error::MalformedGrammar(format!("H{j} is empty")));
        };
        drop_raw(def);
        res.done.insert(j, id);
    }
    // build rules in index order so node ids stay deterministic
    roots.sort_by_key(|r| r.0);
    for (i, (k, label, left, right)) in roots.into_iter().enumerate() {
        if k != i as u32 {
            return Err(Error::MalformedGrammar(format!(
                "rules must be A1..A{n} without gaps"
            )));
        }
        let l = res.resolve(&left)?;
        let r = res.resolve(&right)?;
        drop_raw(left);
        drop_raw(right);
        slots[i] = Some(res.b.node(HLabel::Root { rule: k, label }, l, r));
    }
    let h = HybridDag::from_parts(res.b.finish(slots), start, orientation);
    // a well-formed encoding decodes to a grammar
    h.to_grammar()?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    #[test]
    fn golden_sample() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let h = HybridDag::build(&t, Orientation::Fcns).unwrap();
        let s = write_hybrid(&h);
        assert_eq!(s, "A3:f(A2(_,H1),_)\nA2:f(H1,_)\nA1:g(a,_)\nH1 -> A1(_,A1)\n");
        let back = parse_hybrid(&s, Orientation::Fcns).unwrap();
        assert_eq!(back.unfold().unwrap(), t);
        assert_eq!(back.edges(), 5);
    }

    #[test]
    fn rhdag_roundtrip() {
        let t = parse_term("f(f(a,a,b),f(a,a,c))").unwrap();
        let h = HybridDag::build(&t, Orientation::Lcps).unwrap();
        let back = parse_hybrid(&write_hybrid(&h), Orientation::Lcps).unwrap();
        assert_eq!(back.unfold().unwrap(), t);
        assert_eq!(back.edges(), h.edges());
    }
}
