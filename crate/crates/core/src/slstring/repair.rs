//! RePair: repeatedly replace the most frequent digram by a fresh nonterminal.
//!
//! Counts are of non-overlapping occurrences, taken greedily from the left.
//! Ties go to the digram whose first counted occurrence comes first in the
//! concatenation of the input words. Separators between words never pair.
//! Nonterminals used only once are inlined at the end.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};

use super::{GSym, SlGrammar};

const NIL: u32 = u32::MAX;
const SEP: u32 = u32::MAX - 1;

fn code(s: GSym) -> u32 {
    match s {
        GSym::T(t) => {
            assert!(t < (1 << 31) - 1, "terminal id too large");
            t << 1
        }
        GSym::N(x) => (x << 1) | 1,
    }
}

fn decode(c: u32) -> GSym {
    if c & 1 == 0 {
        GSym::T(c >> 1)
    } else {
        GSym::N(c >> 1)
    }
}

type Pair = (u32, u32);

struct State {
    sym: Vec<u32>,
    prev: Vec<u32>,
    next: Vec<u32>,
    occ: HashMap<Pair, BTreeSet<u32>>,
    /// Current (count, first) of every queued pair.
    key: HashMap<Pair, (usize, u32)>,
    queue: BTreeSet<(Reverse<usize>, u32, Pair)>,
}

impl State {
    fn pair_at(&self, i: u32) -> Option<Pair> {
        let j = self.next[i as usize];
        if j == NIL {
            return None;
        }
        let (a, b) = (self.sym[i as usize], self.sym[j as usize]);
        (a != SEP && b != SEP).then_some((a, b))
    }

    fn remove(&mut self, p: Pair, i: u32) {
        if let Some(set) = self.occ.get_mut(&p) {
            set.remove(&i);
        }
    }

    fn add(&mut self, p: Pair, i: u32) {
        self.occ.entry(p).or_default().insert(i);
    }

    /// Greedy non-overlapping count and first counted position.
    fn count(&self, p: Pair) -> (usize, u32) {
        let Some(set) = self.occ.get(&p) else { return (0, NIL) };
        let Some(&first) = set.first() else { return (0, NIL) };
        if p.0 != p.1 {
            return (set.len(), first);
        }
        let mut n = 0;
        let mut blocked = NIL;
        for &i in set {
            if i != blocked {
                n += 1;
                blocked = self.next[i as usize];
            }
        }
        (n, first)
    }

    fn refresh(&mut self, p: Pair) {
        if let Some((c, f)) = self.key.remove(&p) {
            self.queue.remove(&(Reverse(c), f, p));
        }
        let (c, f) = self.count(p);
        if c >= 2 {
            self.key.insert(p, (c, f));
            self.queue.insert((Reverse(c), f, p));
        } else if c == 0 {
            self.occ.remove(&p);
        }
    }
}

/// Linked-list RePair. Returns the grammar and the compressed words.
pub fn repair(words: &[Vec<GSym>]) -> (SlGrammar, Vec<Vec<GSym>>) {
    let mut sym = Vec::new();
    for (k, w) in words.iter().enumerate() {
        if k > 0 {
            sym.push(SEP);
        }
        sym.extend(w.iter().map(|&s| code(s)));
    }
    let len = sym.len() as u32;
    assert!(len < SEP, "input too long");
    let mut st = State {
        prev: (0..len).map(|i| if i == 0 { NIL } else { i - 1 }).collect(),
        next: (0..len).map(|i| if i + 1 == len { NIL } else { i + 1 }).collect(),
        sym,
        occ: HashMap::new(),
        key: HashMap::new(),
        queue: BTreeSet::new(),
    };
    for i in 0..len {
        if let Some(p) = st.pair_at(i) {
            st.add(p, i);
        }
    }
    let pairs: Vec<Pair> = st.occ.keys().copied().collect();
    for p in pairs {
        st.refresh(p);
    }

    let mut rules: Vec<Vec<GSym>> = Vec::new();
    while let Some(&(_, _, p)) = st.queue.first() {
        let (a, b) = p;
        let x = code(GSym::N(rules.len() as u32));
        rules.push(vec![decode(a), decode(b)]);
        let positions: Vec<u32> = st.occ[&p].iter().copied().collect();
        let mut touched = HashSet::new();
        for i in positions {
            if !st.occ.get(&p).is_some_and(|s| s.contains(&i)) {
                continue;
            }
            let j = st.next[i as usize];
            let before = st.prev[i as usize];
            let after = st.next[j as usize];
            if before != NIL && st.sym[before as usize] != SEP {
                let q = (st.sym[before as usize], a);
                st.remove(q, before);
                touched.insert(q);
            }
            st.remove(p, i);
            if after != NIL && st.sym[after as usize] != SEP {
                let q = (b, st.sym[after as usize]);
                st.remove(q, j);
                touched.insert(q);
            }
            st.sym[i as usize] = x;
            st.sym[j as usize] = SEP;
            st.next[j as usize] = NIL;
            st.prev[j as usize] = NIL;
            st.next[i as usize] = after;
            if after != NIL {
                st.prev[after as usize] = i;
            }
            if before != NIL && st.sym[before as usize] != SEP {
                let q = (st.sym[before as usize], x);
                st.add(q, before);
                touched.insert(q);
            }
            if after != NIL && st.sym[after as usize] != SEP {
                let q = (x, st.sym[after as usize]);
                st.add(q, i);
                touched.insert(q);
            }
        }
        touched.insert(p);
        let mut touched: Vec<Pair> = touched.into_iter().collect();
        touched.sort_unstable();
        for q in touched {
            st.refresh(q);
        }
    }

    let mut out = vec![Vec::new()];
    let mut i = if len == 0 { NIL } else { 0 };
    while i != NIL {
        match st.sym[i as usize] {
            SEP => out.push(Vec::new()),
            c => out.last_mut().unwrap().push(decode(c)),
        }
        i = st.next[i as usize];
    }
    out.truncate(words.len().max(1));
    if words.is_empty() {
        out.clear();
    }
    finish(rules, out)
}

fn finish(rules: Vec<Vec<GSym>>, words: Vec<Vec<GSym>>) -> (SlGrammar, Vec<Vec<GSym>>) {
    let g = SlGrammar { rules };
    let uses = g.usage(&words);
    g.inline_where(&words, |x| uses[x as usize] == 1)
}

/// Straightforward quadratic RePair used as a reference.
pub fn repair_naive(words: &[Vec<GSym>]) -> (SlGrammar, Vec<Vec<GSym>>) {
    let mut words: Vec<Vec<GSym>> = words.to_vec();
    let mut rules: Vec<Vec<GSym>> = Vec::new();
    loop {
        // pair -> (count, first position, right end of last counted occurrence)
        let mut stats: HashMap<(GSym, GSym), (usize, usize, usize)> = HashMap::new();
        let mut pos = 0;
        for w in &words {
            for i in 0..w.len().saturating_sub(1) {
                let p = (w[i], w[i + 1]);
                let here = pos + i;
                let e = stats.entry(p).or_insert((0, here, usize::MAX));
                if p.0 == p.1 && e.2 == here {
                    continue;
                }
                e.0 += 1;
                e.2 = here + 1;
            }
            pos += w.len() + 1;
        }
        let best = stats
            .into_iter()
            .filter(|(_, s)| s.0 >= 2)
            .min_by_key(|&(_, (c, f, _))| (Reverse(c), f));
        let Some(((a, b), _)) = best else { break };
        let x = GSym::N(rules.len() as u32);
        rules.push(vec![a, b]);
        for w in &mut words {
            let mut out = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == a && w[i + 1] == b {
                    out.push(x);
                    i += 2;
                } else {
                    out.push(w[i]);
                    i += 1;
                }
            }
            *w = out;
        }
    }
    finish(rules, words)
}
