//! `B(y1,y2,y3) -> A(y1,A(y2,y3))` rule format; `_` is `□`, the start rule
//! comes first.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write;

use super::{Rhs, SltGrammar, SltRule, SltSym};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::syntax::{escape, lines, reference, Cursor};

fn terminal<'a>(l: &'a str, rules: &HashMap<&str, u32>) -> Cow<'a, str> {
    match escape(l) {
        Cow::Borrowed(s) if rules.contains_key(s) => Cow::Owned(format!("\\{s}")),
        e => e,
    }
}

fn write_rhs(out: &mut String, g: &SltGrammar, rhs: &Rhs, names: &HashMap<&str, u32>) {
    // remaining children of each open node
    let mut open: Vec<u32> = Vec::new();
    for (sym, arity) in rhs.preorder() {
        match sym {
            SltSym::T(l) => out.push_str(&terminal(l.as_str(), names)),
            SltSym::N(x) => out.push_str(&g.rule(x).name),
            SltSym::Param(i) => write!(out, "y{}", i + 1).unwrap(),
            SltSym::Box => out.push('_'),
        }
        if arity > 0 {
            out.push('(');
            open.push(arity);
            continue;
        }
        loop {
            match open.last_mut() {
                None => break,
                Some(top) => {
                    *top -= 1;
                    if *top == 0 {
                        out.push(')');
                        open.pop();
                    } else {
                        out.push(',');
                        break;
                    }
                }
            }
        }
    }
}

/// Renders the grammar; rule names are written verbatim and must be unique.
pub fn write_slt(g: &SltGrammar) -> String {
    assert!(g.has_unique_names(), "rule names must be unique");
    let names: HashMap<&str, u32> =
        g.rules().iter().enumerate().map(|(i, r)| (r.name.as_str(), i as u32)).collect();
    let mut order: Vec<u32> = (0..g.rules().len() as u32).filter(|&x| x != g.start()).collect();
    order.insert(0, g.start());
    let mut out = String::new();
    for x in order {
        let r = g.rule(x);
        out.push_str(&r.name);
        if r.rank > 0 {
            out.push('(');
            for i in 0..r.rank {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "y{}", i + 1).unwrap();
            }
            out.push(')');
        }
        out.push_str(" -> ");
        write_rhs(&mut out, g, &r.rhs, &names);
        out.push('\n');
    }
    out
}

fn read_rhs(cur: &mut Cursor, names: &HashMap<String, u32>) -> Result<Vec<(SltSym, u32)>> {
    let mut nodes: Vec<(SltSym, u32)> = Vec::new();
    // indices of nodes whose child list is open
    let mut open: Vec<usize> = Vec::new();
    loop {
        let (text, escaped) = cur.ident()?;
        let sym = if escaped {
            SltSym::T(Label::new(&text)?)
        } else if text == "_" {
            SltSym::Box
        } else if let Some(i) = reference(&text, false, "y") {
            if i == 0 {
                return cur.err("parameters start at y1");
            }
            SltSym::Param(i - 1)
        } else if let Some(&x) = names.get(&text) {
            SltSym::N(x)
        } else {
            SltSym::T(Label::new(&text)?)
        };
        nodes.push((sym, 0));
        if cur.eat('(') {
            open.push(nodes.len() - 1);
            continue;
        }
        loop {
            let Some(&p) = open.last() else { return Ok(nodes) };
            nodes[p].1 += 1;
            if cur.eat(',') {
                break;
            }
            cur.expect(')')?;
            open.pop();
        }
    }
}

/// Parses the format of [`write_slt`]; the first rule is the start rule.
pub fn parse_slt(text: &str) -> Result<SltGrammar> {
    let mut heads = Vec::new();
    let mut names: HashMap<String, u32> = HashMap::new();
    for (offset, line) in lines(text) {
        let mut cur = Cursor::new(line, offset)?;
        let (name, escaped) = cur.ident()?;
        if escaped || name == "_" || name == "->" {
            return cur.err("invalid rule name");
        }
        let mut rank = 0;
        if cur.eat('(') {
            loop {
                match cur.ident()? {
                    (p, false) if reference(&p, false, "y") == Some(rank + 1) => rank += 1,
                    _ => return cur.err(format!("expected y{}", rank + 1)),
                }
                if cur.eat(')') {
                    break;
                }
                cur.expect(',')?;
            }
        }
        cur.expect_arrow()?;
        if names.insert(name.clone(), heads.len() as u32).is_some() {
            return cur.err(format!("rule {name} defined twice"));
        }
        heads.push((name, rank, cur));
    }
    if heads.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rules = Vec::with_capacity(heads.len());
    for (name, rank, mut cur) in heads {
        let nodes = read_rhs(&mut cur, &names)?;
        cur.finish()?;
        rules.push(SltRule { name, rank, rhs: Rhs::from_preorder(&nodes)? });
    }
    SltGrammar::new(rules, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = "S -> B(a,b,B(c,\\A,_))\nB(y1,y2,y3) -> A(y1,A(y2,y3))\nA(y1,y2) -> f(g(y1),y2)\n";
        let g = parse_slt(text).unwrap();
        assert_eq!(write_slt(&g), text);
        assert_eq!(g.rule(0).rhs.sym(5), SltSym::T(Label::of("A")));
    }

    #[test]
    fn deep_chain() {
        let mut s = String::from("S -> ");
        for _ in 0..100_000 {
            s.push_str("f(a,");
        }
        s.push('b');
        s.push_str(&")".repeat(100_000));
        s.push('\n');
        let g = parse_slt(&s).unwrap();
        assert_eq!(g.size(), 200_000);
        assert_eq!(write_slt(&g), s);
    }
}
