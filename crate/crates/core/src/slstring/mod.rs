//! Straight-line string grammars.

mod access;
mod repair;

use std::fmt::Write;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::syntax::{escape, lines, reference, Cursor};

pub use access::AccessIndex;
pub use repair::{repair, repair_naive};

/// A grammar symbol: terminal `T(id)` or nonterminal `N(rule index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GSym {
    T(u32),
    N(u32),
}

/// An acyclic set of string rules `X → w` without a start symbol.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlGrammar {
    rules: Vec<Vec<GSym>>,
}

impl SlGrammar {
    pub fn empty() -> SlGrammar {
        SlGrammar::default()
    }

    /// Validates references and acyclicity.
    pub fn new(rules: Vec<Vec<GSym>>) -> Result<SlGrammar> {
        let g = SlGrammar { rules };
        g.topological_order()?;
        Ok(g)
    }

    pub fn rules(&self) -> &[Vec<GSym>] {
        &self.rules
    }

    pub fn rule(&self, k: u32) -> &[GSym] {
        &self.rules[k as usize]
    }

    /// Number of nonterminals.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `Σ_X |ρ(X)|`.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    /// Nonterminals ordered so that every rule follows the rules it uses.
    pub fn topological_order(&self) -> Result<Vec<u32>> {
        let n = self.rules.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for s in 0..n as u32 {
            if state[s as usize] != 0 {
                continue;
            }
            let mut stack = vec![(s, 0usize)];
            state[s as usize] = 1;
            while let Some(top) = stack.last_mut() {
                let (x, i) = *top;
                let Some(sym) = self.rules[x as usize].get(i) else {
                    state[x as usize] = 2;
                    order.push(x);
                    stack.pop();
                    continue;
                };
                top.1 += 1;
                if let GSym::N(y) = *sym {
                    match state.get(y as usize) {
                        None => {
                            return Err(Error::MalformedGrammar(format!(
                                "rule {x} uses undefined nonterminal {y}"
                            )))
                        }
                        Some(0) => {
                            state[y as usize] = 1;
                            stack.push((y, 0));
                        }
                        Some(1) => return Err(Error::CyclicGrammar(format!("R{}", y + 1))),
                        _ => {}
                    }
                }
            }
        }
        Ok(order)
    }

    /// Expansion length of every nonterminal.
    pub fn lengths(&self) -> Vec<BigUint> {
        let mut len = vec![BigUint::zero(); self.rules.len()];
        for x in self.topological_order().expect("validated grammar") {
            let mut s = BigUint::zero();
            for sym in &self.rules[x as usize] {
                match *sym {
                    GSym::T(_) => s += 1u32,
                    GSym::N(y) => s += &len[y as usize],
                }
            }
            len[x as usize] = s;
        }
        len
    }

    pub fn word_length(&self, word: &[GSym]) -> BigUint {
        let len = self.lengths();
        let mut s = BigUint::zero();
        for sym in word {
            match *sym {
                GSym::T(_) => s += 1u32,
                GSym::N(y) => s += &len[y as usize],
            }
        }
        s
    }

    /// `eval_G(word)`, refusing results longer than `budget`.
    pub fn expand(&self, word: &[GSym], budget: u64) -> Result<Vec<u32>> {
        let total = self.word_length(word);
        if total > BigUint::from(budget) {
            return Err(Error::BudgetExceeded { budget });
        }
        let mut out = Vec::with_capacity(total.to_usize().unwrap_or(0));
        let mut stack: Vec<GSym> = word.iter().rev().copied().collect();
        while let Some(s) = stack.pop() {
            match s {
                GSym::T(t) => out.push(t),
                GSym::N(x) => stack.extend(self.rules[x as usize].iter().rev()),
            }
        }
        Ok(out)
    }

    /// Number of occurrences of each nonterminal in rules and in `words`.
    pub fn usage(&self, words: &[Vec<GSym>]) -> Vec<usize> {
        let mut uses = vec![0usize; self.rules.len()];
        for w in self.rules.iter().chain(words) {
            for s in w {
                if let GSym::N(x) = *s {
                    uses[x as usize] += 1;
                }
            }
        }
        uses
    }

    /// Inlines every nonterminal for which `inline` holds, renumbering the rest.
    /// Returns the new grammar and the rewritten words.
    pub fn inline_where(
        &self,
        words: &[Vec<GSym>],
        inline: impl Fn(u32) -> bool,
    ) -> (SlGrammar, Vec<Vec<GSym>>) {
        let n = self.rules.len();
        let mut new_id = vec![u32::MAX; n];
        let mut k = 0;
        for x in 0..n as u32 {
            if !inline(x) {
                new_id[x as usize] = k;
                k += 1;
            }
        }
        let rewrite = |w: &[GSym]| -> Vec<GSym> {
            let mut out = Vec::with_capacity(w.len());
            let mut stack: Vec<GSym> = w.iter().rev().copied().collect();
            while let Some(s) = stack.pop() {
                match s {
                    GSym::N(x) if new_id[x as usize] == u32::MAX => {
                        stack.extend(self.rules[x as usize].iter().rev())
                    }
                    GSym::N(x) => out.push(GSym::N(new_id[x as usize])),
                    t => out.push(t),
                }
            }
            out
        };
        let rules = (0..n)
            .filter(|&x| new_id[x] != u32::MAX)
            .map(|x| rewrite(&self.rules[x]))
            .collect();
        let words = words.iter().map(|w| rewrite(w)).collect();
        (SlGrammar { rules }, words)
    }
}

fn write_word(out: &mut String, w: &[GSym], term: &dyn Fn(u32) -> String) {
    for (i, s) in w.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        match *s {
            GSym::T(t) => out.push_str(&escape(&term(t))),
            GSym::N(x) => write!(out, "R{}", x + 1).unwrap(),
        }
    }
}

/// `R1 -> A A` lines followed by `start:` with the words separated by `$1, $2, …`.
pub fn write_sl(g: &SlGrammar, words: &[Vec<GSym>], term: &dyn Fn(u32) -> String) -> String {
    let mut out = String::new();
    for (x, r) in g.rules().iter().enumerate() {
        write!(out, "R{} ->", x + 1).unwrap();
        if !r.is_empty() {
            out.push(' ');
        }
        write_word(&mut out, r, term);
        out.push('\n');
    }
    out.push_str("start:");
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            write!(out, " ${i}").unwrap();
        }
        if !w.is_empty() {
            out.push(' ');
            write_word(&mut out, w, term);
        }
    }
    out.push('\n');
    out
}

fn read_word(cur: &mut Cursor, term: &dyn Fn(&str) -> Option<u32>) -> Result<Vec<Vec<GSym>>> {
    let mut words = vec![Vec::new()];
    while !cur.at_end() {
        let (text, escaped) = cur.ident()?;
        if !escaped && text.starts_with('$') {
            words.push(Vec::new());
            continue;
        }
        let sym = match reference(&text, escaped, "R") {
            Some(0) => return cur.err("R0 is not a rule name"),
            Some(k) => GSym::N(k - 1),
            None => match term(&text) {
                Some(t) => GSym::T(t),
                None => return cur.err(format!("unknown terminal {text:?}")),
            },
        };
        words.last_mut().unwrap().push(sym);
    }
    Ok(words)
}

/// Parses the format of [`write_sl`]; `term` resolves terminal names.
pub fn parse_sl(text: &str, term: &dyn Fn(&str) -> Option<u32>) -> Result<(SlGrammar, Vec<Vec<GSym>>)> {
    let mut rules: Vec<Vec<GSym>> = Vec::new();
    let mut start = None;
    for (offset, line) in lines(text) {
        let mut cur = Cursor::new(line, offset)?;
        let (name, escaped) = cur.ident()?;
        if !escaped && name == "start" {
            cur.expect(':')?;
            start = Some(read_word(&mut cur, term)?);
            continue;
        }
        match reference(&name, escaped, "R") {
            Some(k) if k as usize == rules.len() + 1 => {}
            _ => return cur.err(format!("expected R{}", rules.len() + 1)),
        }
        cur.expect_arrow()?;
        let w = read_word(&mut cur, term)?;
        if w.len() != 1 {
            return cur.err("separator in a rule");
        }
        rules.push(w.into_iter().next().unwrap());
    }
    let Some(words) = start else { return Err(Error::EmptyInput) };
    Ok((SlGrammar::new(rules)?, words))
}
