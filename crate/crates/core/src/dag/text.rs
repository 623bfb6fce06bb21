//! `A3 -> f(A1,a,A1)` rule format for dags and binary dags.

use std::collections::HashMap;
use std::fmt::Write;

use super::{BinaryDag, BinaryDagBuilder, Dag, DagBuilder};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::syntax::{escape, lines, reference, Cursor};

/// Numbers the non-leaf nodes `1..` in id order.
fn names(is_leaf: impl Fn(u32) -> bool, n: usize) -> Vec<u32> {
    let mut k = 0;
    (0..n as u32)
        .map(|v| {
            if is_leaf(v) {
                0
            } else {
                k += 1;
                k
            }
        })
        .collect()
}

fn rule_order(root: u32, name: &[u32]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..name.len() as u32)
        .filter(|&v| name[v as usize] != 0 && v != root)
        .collect();
    order.sort_by_key(|&v| std::cmp::Reverse(name[v as usize]));
    order.insert(0, root);
    order
}

/// Writes a single-rooted dag; the start rule comes first, the others follow
/// in descending order, and leaves are written inline as labels.
pub fn write_dag(d: &Dag) -> String {
    let root = d.root();
    if d.is_leaf(root) {
        return format!("{}\n", escape(d.label(root).as_str()));
    }
    let name = names(|v| d.is_leaf(v), d.nodes());
    let mut out = String::new();
    for v in rule_order(root, &name) {
        write!(out, "A{} -> {}(", name[v as usize], escape(d.label(v).as_str())).unwrap();
        for (i, &c) in d.children(v).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if d.is_leaf(c) {
                out.push_str(&escape(d.label(c).as_str()));
            } else {
                write!(out, "A{}", name[c as usize]).unwrap();
            }
        }
        out.push_str(")\n");
    }
    out
}

/// Writes a single-rooted binary dag with `□` as `_`; a node with two absent
/// children is written inline as its label.
pub fn write_binary_dag(d: &BinaryDag) -> String {
    let Some(root) = d.root() else { return "_\n".into() };
    let leaf = |v: u32| d.left(v).is_none() && d.right(v).is_none();
    if leaf(root) {
        return format!("{}\n", escape(d.label(root).as_str()));
    }
    let name = names(leaf, d.nodes());
    let child = |c: Option<u32>| match c {
        None => "_".to_string(),
        Some(c) if leaf(c) => escape(d.label(c).as_str()).into_owned(),
        Some(c) => format!("A{}", name[c as usize]),
    };
    let mut out = String::new();
    for v in rule_order(root, &name) {
        writeln!(
            out,
            "A{} -> {}({},{})",
            name[v as usize],
            escape(d.label(v).as_str()),
            child(d.left(v)),
            child(d.right(v))
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub(crate) enum Item {
    Ref(u32),
    Label(Label),
    Box,
}

pub(crate) fn item(cur: &mut Cursor, prefix: &str) -> Result<Item> {
    let (text, escaped) = cur.ident()?;
    if !escaped && text == "_" {
        return Ok(Item::Box);
    }
    if let Some(k) = reference(&text, escaped, prefix) {
        return Ok(Item::Ref(k));
    }
    Ok(Item::Label(Label::new(&text)?))
}

struct RawRule {
    lhs: u32,
    label: Label,
    kids: Vec<Item>,
    offset: usize,
}

enum Parsed {
    Leaf(Label),
    Rules(Vec<RawRule>),
}

fn parse_rules(text: &str) -> Result<Parsed> {
    let mut rules = Vec::new();
    let mut all: Vec<(usize, &str)> = lines(text).collect();
    if all.is_empty() {
        return Err(Error::EmptyInput);
    }
    if all.len() == 1 {
        let mut cur = Cursor::new(all[0].1, all[0].0)?;
        let (t, escaped) = cur.ident()?;
        if cur.at_end() {
            if !escaped && t == "_" {
                return cur.err("empty dag");
            }
            return Ok(Parsed::Leaf(Label::new(&t)?));
        }
    }
    for (offset, line) in all.drain(..) {
        let mut cur = Cursor::new(line, offset)?;
        let (t, escaped) = cur.ident()?;
        let Some(lhs) = reference(&t, escaped, "A") else {
            return cur.err("expected a rule name A<k>");
        };
        cur.expect_arrow()?;
        let (l, _) = cur.ident()?;
        let label = Label::new(&l)?;
        let mut kids = Vec::new();
        if cur.eat('(') {
            loop {
                kids.push(item(&mut cur, "A")?);
                if cur.eat(')') {
                    break;
                }
                cur.expect(',')?;
            }
        }
        cur.finish()?;
        rules.push(RawRule {
            lhs,
            label,
            kids,
            offset,
        });
    }
    Ok(Parsed::Rules(rules))
}

/// Order in which rules can be built bottom-up, starting from rule 0.
fn topo(rules: &[RawRule]) -> Result<(HashMap<u32, usize>, Vec<usize>)> {
    let mut by_name = HashMap::new();
    for (i, r) in rules.iter().enumerate() {
        if by_name.insert(r.lhs, i).is_some() {
            return Err(Error::Syntax {
                offset: r.offset,
                message: format!("A{} defined twice", r.lhs),
            });
        }
    }
    let mut state = vec![0u8; rules.len()];
    let mut order = Vec::new();
    let mut stack = vec![(0usize, false)];
    while let Some((i, done)) = stack.pop() {
        if done {
            state[i] = 2;
            order.push(i);
            continue;
        }
        if state[i] == 2 {
            continue;
        }
        if state[i] == 1 {
            return Err(Error::CyclicGrammar(format!("A{}", rules[i].lhs)));
        }
        state[i] = 1;
        stack.push((i, true));
        for k in &rules[i].kids {
            if let Item::Ref(j) = k {
                let Some(&c) = by_name.get(j) else {
                    return Err(Error::Syntax {
                        offset: rules[i].offset,
                        message: format!("undefined A{j}"),
                    });
                };
                match state[c] {
                    1 => return Err(Error::CyclicGrammar(format!("A{j}"))),
                    0 => stack.push((c, false)),
                    _ => {}
                }
            }
        }
    }
    Ok((by_name, order))
}

pub fn parse_dag(text: &str) -> Result<Dag> {
    let rules = match parse_rules(text)? {
        Parsed::Leaf(l) => {
            let mut b = DagBuilder::new();
            let r = b.node(l, &[]);
            return Ok(b.finish(vec![r]));
        }
        Parsed::Rules(r) => r,
    };
    let (by_name, order) = topo(&rules)?;
    let mut b = DagBuilder::new();
    let mut id = vec![0u32; rules.len()];
    for i in order {
        let mut kids = Vec::new();
        for k in &rules[i].kids {
            kids.push(match k {
                Item::Ref(j) => id[by_name[j]],
                Item::Label(l) => b.node(*l, &[]),
                Item::Box => {
                    return Err(Error::Syntax {
                        offset: rules[i].offset,
                        message: "'_' in an unranked dag".into(),
                    })
                }
            });
        }
        id[i] = b.node(rules[i].label, &kids);
    }
    let root = id[0];
    Ok(b.finish(vec![root]))
}

pub fn parse_binary_dag(text: &str) -> Result<BinaryDag> {
    if lines(text).count() == 1 && lines(text).next().unwrap().1.trim() == "_" {
        return Ok(BinaryDagBuilder::new().finish(vec![None]));
    }
    let rules = match parse_rules(text)? {
        Parsed::Leaf(l) => {
            let mut b = BinaryDagBuilder::new();
            let r = b.node(l, None, None);
            return Ok(b.finish(vec![Some(r)]));
        }
        Parsed::Rules(r) => r,
    };
    let (by_name, order) = topo(&rules)?;
    let mut b = BinaryDagBuilder::new();
    let mut id = vec![0u32; rules.len()];
    for i in order {
        let r = &rules[i];
        if !r.kids.is_empty() && r.kids.len() != 2 {
            return Err(Error::Syntax {
                offset: r.offset,
                message: "binary rules need exactly two children".into(),
            });
        }
        let mut slot = [None, None];
        for (s, k) in r.kids.iter().enumerate() {
            slot[s] = match k {
                Item::Ref(j) => Some(id[by_name[j]]),
                Item::Label(l) => Some(b.node(*l, None, None)),
                Item::Box => None,
            };
        }
        id[i] = b.node(r.label, slot[0], slot[1]);
    }
    let root = id[0];
    Ok(b.finish(vec![Some(root)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{minimize, minimize_binary};
    use crate::encode::fcns;
    use crate::tree::parse_term;

    #[test]
    fn golden_sample() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let d = minimize(&t);
        let s = write_dag(&d);
        assert_eq!(s, "A3 -> f(A2,A1,A1)\nA2 -> f(A1,A1)\nA1 -> g(a)\n");
        assert_eq!(parse_dag(&s).unwrap().unfold().unwrap(), t);
        let b = minimize_binary(&fcns(&[t]));
        let s = write_binary_dag(&b);
        assert_eq!(s, "A4 -> f(A3,_)\nA3 -> f(A2,A2)\nA2 -> g(a,A1)\nA1 -> g(a,_)\n");
        assert_eq!(parse_binary_dag(&s).unwrap(), b);
    }

    #[test]
    fn leaf_and_errors() {
        let d = minimize(&parse_term("a").unwrap());
        assert_eq!(write_dag(&d), "a\n");
        assert_eq!(parse_dag("a\n").unwrap(), d);
        assert!(matches!(parse_dag("A1 -> f(A2)\nA2 -> g(A1)"), Err(Error::CyclicGrammar(_))));
        assert!(matches!(parse_dag("A1 -> f(A7)"), Err(Error::Syntax { .. })));
        assert_eq!(parse_dag(""), Err(Error::EmptyInput));
    }

    #[test]
    fn reserved_labels_escape() {
        let t = parse_term("A1(_,A2)").unwrap();
        let d = minimize(&t);
        let s = write_dag(&d);
        assert_eq!(s, "A1 -> \\A1(\\_,\\A2)\n");
        assert_eq!(parse_dag(&s).unwrap().unfold().unwrap(), t);
    }
}
