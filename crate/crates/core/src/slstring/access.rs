//! Random access into `eval_G(w)` by descending through prefix sums.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{GSym, SlGrammar};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Sums {
    Small { rules: Vec<Vec<u64>>, start: Vec<u64> },
    Big { rules: Vec<Vec<BigUint>>, start: Vec<BigUint> },
}

/// Answers `eval_G(w)[p]` in time proportional to the derivation depth
/// times the logarithm of the rule lengths.
#[derive(Clone, Debug)]
pub struct AccessIndex {
    grammar: SlGrammar,
    word: Vec<GSym>,
    sums: Sums,
    total: BigUint,
}

fn prefix(word: &[GSym], len: &[BigUint]) -> Vec<BigUint> {
    let mut acc = BigUint::zero();
    word.iter()
        .map(|s| {
            match *s {
                GSym::T(_) => acc += 1u32,
                GSym::N(x) => acc += &len[x as usize],
            }
            acc.clone()
        })
        .collect()
}

impl AccessIndex {
    pub fn new(grammar: &SlGrammar, word: &[GSym]) -> AccessIndex {
        let len = grammar.lengths();
        let rules: Vec<Vec<BigUint>> = grammar.rules().iter().map(|r| prefix(r, &len)).collect();
        let start = prefix(word, &len);
        let total = start.last().cloned().unwrap_or_default();
        let sums = if total.to_u64().is_some() {
            let small = |v: &Vec<BigUint>| v.iter().map(|x| x.to_u64().unwrap()).collect();
            Sums::Small { rules: rules.iter().map(small).collect(), start: small(&start) }
        } else {
            Sums::Big { rules, start }
        };
        AccessIndex { grammar: grammar.clone(), word: word.to_vec(), sums, total }
    }

    pub fn len(&self) -> &BigUint {
        &self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_zero()
    }

    fn out_of_range(&self, p: impl ToString) -> Error {
        Error::IndexOutOfRange { index: p.to_string(), len: self.total.to_string() }
    }

    /// The terminal at 1-based position `p`.
    pub fn get_u64(&self, p: u64) -> Result<u32> {
        match &self.sums {
            Sums::Small { rules, start } => {
                if p == 0 || p > self.total.to_u64().unwrap() {
                    return Err(self.out_of_range(p));
                }
                let mut p = p;
                let mut word: &[GSym] = &self.word;
                let mut sums: &[u64] = start;
                loop {
                    let i = sums.partition_point(|&c| c < p);
                    if i > 0 {
                        p -= sums[i - 1];
                    }
                    match word[i] {
                        GSym::T(t) => return Ok(t),
                        GSym::N(x) => {
                            word = self.grammar.rule(x);
                            sums = &rules[x as usize];
                        }
                    }
                }
            }
            Sums::Big { .. } => self.get(&BigUint::from(p)),
        }
    }

    /// The terminal at 1-based position `p`.
    pub fn get(&self, p: &BigUint) -> Result<u32> {
        if p.is_zero() || *p > self.total {
            return Err(self.out_of_range(p));
        }
        let Sums::Big { rules, start } = &self.sums else {
            return self.get_u64(p.to_u64().unwrap());
        };
        let mut p = p.clone();
        let mut word: &[GSym] = &self.word;
        let mut sums: &[BigUint] = start;
        loop {
            let i = sums.partition_point(|c| *c < p);
            if i > 0 {
                p -= &sums[i - 1];
            }
            match word[i] {
                GSym::T(t) => return Ok(t),
                GSym::N(x) => {
                    word = self.grammar.rule(x);
                    sums = &rules[x as usize];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GSym::{N, T};

    #[test]
    fn matches_expansion() {
        let g = SlGrammar::new(vec![vec![T(1), T(2)], vec![], vec![N(0), N(1), T(3), N(0)]]).unwrap();
        let w = vec![N(2), T(9), N(1), N(0)];
        let flat = g.expand(&w, 100).unwrap();
        let idx = AccessIndex::new(&g, &w);
        assert_eq!(idx.len(), &BigUint::from(flat.len()));
        for (i, &t) in flat.iter().enumerate() {
            assert_eq!(idx.get_u64(i as u64 + 1).unwrap(), t);
        }
        assert!(idx.get_u64(0).is_err());
        assert!(idx.get_u64(flat.len() as u64 + 1).is_err());
    }

    #[test]
    fn huge_expansions() {
        // R_{k+1} -> R_k R_k, 2^80 symbols
        let mut rules = vec![vec![T(0), T(1)]];
        for k in 0..79 {
            rules.push(vec![N(k), N(k)]);
        }
        let g = SlGrammar::new(rules).unwrap();
        let idx = AccessIndex::new(&g, &[N(79)]);
        assert_eq!(idx.len(), &(BigUint::from(1u32) << 80));
        let last = BigUint::from(1u32) << 80;
        assert_eq!(idx.get(&last).unwrap(), 1);
        assert_eq!(idx.get(&(last - 1u32)).unwrap(), 0);
        assert_eq!(idx.get_u64(3).unwrap(), 0);
    }
}
