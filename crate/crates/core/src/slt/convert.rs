//! Compressed dags to 1-SLT grammars for the fcns encoding.

use std::rc::Rc;

use super::{CompressedDag, Rhs, SltGrammar, SltRule, SltSym};
use crate::error::{Error, Result};
use crate::slstring::GSym;

/// Rule slots: `v`, `v̂` and `v'` for every node, then `X`, `X̂`, `X'`.
struct Slots {
    nv: u32,
    rules: Vec<Option<SltRule>>,
}

impl Slots {
    fn new(nv: usize, nn: usize) -> Slots {
        Slots { nv: nv as u32, rules: vec![None; 3 * (nv + nn)] }
    }

    fn base(&self, s: GSym) -> u32 {
        match s {
            GSym::T(v) => 3 * v,
            GSym::N(x) => 3 * (self.nv + x),
        }
    }

    fn plain(&self, s: GSym) -> SltSym {
        SltSym::N(self.base(s))
    }

    fn hat(&self, s: GSym) -> SltSym {
        SltSym::N(self.base(s) + 1)
    }

    fn prime(&self, s: GSym) -> SltSym {
        SltSym::N(self.base(s) + 2)
    }

    fn set(&mut self, slot: SltSym, rank: u32, nodes: &[(SltSym, u32)]) {
        let SltSym::N(i) = slot else { unreachable!() };
        let (kind, k) = if i < 3 * self.nv { ("V", i / 3) } else { ("R", i / 3 - self.nv) };
        let suffix = ["", "_h", "_p"][(i % 3) as usize];
        self.rules[i as usize] = Some(SltRule {
            name: format!("{kind}{}{suffix}", k + 1),
            rank,
            rhs: Rhs::from_preorder(nodes).expect("well-formed rule"),
        });
    }

    /// `h1(h2(…(last)…))`
    fn chain(&self, hats: &[GSym], last: SltSym) -> Vec<(SltSym, u32)> {
        let mut out: Vec<(SltSym, u32)> = hats.iter().map(|&a| (self.hat(a), 1)).collect();
        out.push((last, 0));
        out
    }

    /// Rules for a dag node; `tail` renders the last child symbol of `v'`.
    fn node(&mut self, d: &CompressedDag, v: u32, tail: impl Fn(&Slots, GSym) -> SltSym) {
        let f = SltSym::T(d.label(v));
        let me = GSym::T(v);
        let gamma = d.gamma(v);
        let (plain, hat, prime) = (self.plain(me), self.hat(me), self.prime(me));
        match gamma.split_last() {
            None => {
                self.set(plain, 0, &[(f, 0)]);
                self.set(hat, 1, &[(f, 2), (SltSym::Box, 0), (SltSym::Param(0), 0)]);
            }
            Some((&last, init)) => {
                self.set(plain, 0, &[(f, 2), (prime, 0), (SltSym::Box, 0)]);
                self.set(hat, 1, &[(f, 2), (prime, 0), (SltSym::Param(0), 0)]);
                let body = self.chain(init, tail(self, last));
                self.set(prime, 0, &body);
            }
        }
    }

    fn finish(self, start: u32) -> SltGrammar {
        let mut id = vec![u32::MAX; self.rules.len()];
        let mut k = 0;
        for (i, r) in self.rules.iter().enumerate() {
            if r.is_some() {
                id[i] = k;
                k += 1;
            }
        }
        let rules = self
            .rules
            .into_iter()
            .flatten()
            .map(|mut r| {
                let nodes: Vec<(SltSym, u32)> = r
                    .rhs
                    .preorder()
                    .map(|(s, a)| match s {
                        SltSym::N(i) => (SltSym::N(id[i as usize]), a),
                        s => (s, a),
                    })
                    .collect();
                r.rhs = Rhs::from_preorder(&nodes).unwrap();
                r
            })
            .collect();
        SltGrammar::new(rules, id[3 * start as usize]).expect("construction is well-formed").prune()
    }
}

/// 1-SLT grammar producing `fcns(eval(D))`. String rules of length at most
/// one are inlined first so that every remaining rule has length ≥ 2.
pub fn to_one_slt(d: &CompressedDag) -> SltGrammar {
    let g = d.grammar();
    let words: Vec<Vec<GSym>> = (0..d.node_count() as u32).map(|v| d.gamma(v).to_vec()).collect();
    let (g, words) = g.inline_where(&words, |x| g.rule(x).len() <= 1);
    let d = CompressedDag::new(d.labels().to_vec(), words, g, d.root()).expect("inlining keeps validity");
    let mut s = Slots::new(d.node_count(), d.nonterminal_count());
    for v in 0..d.node_count() as u32 {
        s.node(&d, v, |s, a| s.plain(a));
    }
    for (x, rho) in d.grammar().rules().iter().enumerate() {
        let me = GSym::N(x as u32);
        let (&last, init) = rho.split_last().unwrap();
        let (plain, hat, prime) = (s.plain(me), s.hat(me), s.prime(me));
        s.set(plain, 0, &[(prime, 1), (s.plain(last), 0)]);
        s.set(hat, 1, &[(prime, 1), (s.hat(last), 1), (SltSym::Param(0), 0)]);
        let body = s.chain(init, SltSym::Param(0));
        s.set(prime, 1, &body);
    }
    s.finish(d.root())
}

/// 1-SLT grammar for a right-regular compressed dag such as an hdag; no
/// copies of the string nonterminals are needed.
pub fn hdag_to_one_slt(d: &CompressedDag) -> Result<SltGrammar> {
    if !d.is_right_regular() {
        return Err(Error::NotRightRegular);
    }
    let mut s = Slots::new(d.node_count(), d.nonterminal_count());
    for v in 0..d.node_count() as u32 {
        s.node(d, v, |s, a| s.plain(a));
    }
    for (x, rho) in d.grammar().rules().iter().enumerate() {
        let (&last, init) = rho.split_last().unwrap();
        let body = s.chain(init, s.plain(last));
        s.set(s.plain(GSym::N(x as u32)), 0, &body);
    }
    Ok(s.finish(d.root()))
}

enum Work {
    Own(u32),
    Inlined { rule: u32, node: u32, args: Rc<Vec<u32>> },
}

/// Inlines every rule whose removal does not increase the grammar size:
/// a rule of size `s` and rank `r` used `c` times is inlined when
/// `c·(s − r) ≤ s`. Rules are decided callers first, so usage counts
/// already reflect copies made by inlining their callers.
pub fn simplify(g: &SltGrammar) -> SltGrammar {
    inline_rules(g, |_, c, s, r| c * (s - r) <= s)
}

/// Removes only the conversion helpers: rules that cost nothing per use
/// (`s ≤ r`) and the primed rules `V<k>_p`, `R<k>_p` when used once. The
/// copies `v`, `v̂`, `X`, `X̂` stay, as in the hand-simplified grammars.
pub fn eliminate_helpers(g: &SltGrammar) -> SltGrammar {
    inline_rules(g, |r, c, s, rank| s <= rank || (c == 1 && r.name.ends_with("_p")))
}

fn inline_rules(g: &SltGrammar, pick: impl Fn(&SltRule, i64, i64, i64) -> bool) -> SltGrammar {
    let g = g.prune();
    let n = g.rules().len();
    let mut count = vec![0i64; n];
    for r in g.rules() {
        for (s, _) in r.rhs.preorder() {
            if let SltSym::N(y) = s {
                count[y as usize] += 1;
            }
        }
    }
    let order = g.callers_first();
    let mut inline = vec![false; n];
    for &x in &order {
        let r = g.rule(x);
        let (c, s, rank) = (count[x as usize], r.rhs.size() as i64, r.rank as i64);
        if x == g.start() || !pick(r, c, s, rank) {
            continue;
        }
        inline[x as usize] = true;
        for (sym, _) in r.rhs.preorder() {
            if let SltSym::N(y) = sym {
                count[y as usize] += c - 1;
            }
        }
    }

    let mut done: Vec<Option<Rhs>> = vec![None; n];
    for &z in order.iter().rev() {
        let own = &g.rule(z).rhs;
        let mut out: Vec<(SltSym, u32)> = Vec::with_capacity(own.len());
        let mut stack = vec![Work::Own(0)];
        while let Some(w) = stack.pop() {
            match w {
                Work::Own(i) => match own.sym(i) {
                    SltSym::N(x) if inline[x as usize] => stack.push(Work::Inlined {
                        rule: x,
                        node: 0,
                        args: Rc::new(own.children(i).to_vec()),
                    }),
                    sym => {
                        let kids = own.children(i);
                        out.push((sym, kids.len() as u32));
                        stack.extend(kids.iter().rev().map(|&c| Work::Own(c)));
                    }
                },
                Work::Inlined { rule, node, args } => {
                    let body = done[rule as usize].as_ref().unwrap();
                    match body.sym(node) {
                        SltSym::Param(j) => stack.push(Work::Own(args[j as usize])),
                        sym => {
                            let kids = body.children(node);
                            out.push((sym, kids.len() as u32));
                            stack.extend(kids.iter().rev().map(|&c| Work::Inlined {
                                rule,
                                node: c,
                                args: args.clone(),
                            }));
                        }
                    }
                }
            }
        }
        done[z as usize] = Some(Rhs::from_preorder(&out).unwrap());
    }
    let rules = g
        .rules()
        .iter()
        .zip(done)
        .map(|(r, rhs)| SltRule { name: r.name.clone(), rank: r.rank, rhs: rhs.unwrap() })
        .collect();
    SltGrammar::new(rules, g.start()).expect("inlining keeps validity").prune()
}

#[cfg(test)]
mod tests {
    use super::super::build_compressed_dag;
    use super::super::UNFOLD_BUDGET;
    use super::*;
    use crate::encode::fcns;
    use crate::hybrid::{HybridDag, Orientation};
    use crate::label::Label;
    use crate::tree::{parse_term, UnrankedTree};

    fn check(d: &CompressedDag, t: &UnrankedTree) -> SltGrammar {
        let g = to_one_slt(d);
        assert!(g.max_rank() <= 1);
        assert!(g.size() <= d.size() + 2 * (d.node_count() + d.nonterminal_count()));
        assert_eq!(g.unfold_binary(UNFOLD_BUDGET).unwrap(), fcns(std::slice::from_ref(t)));
        for s in [simplify(&g), eliminate_helpers(&g)] {
            assert!(s.size() <= g.size());
            assert_eq!(s.unfold_binary(UNFOLD_BUDGET).unwrap(), fcns(std::slice::from_ref(t)));
        }
        g
    }

    #[test]
    fn doubling_family() {
        for n in 2..=8 {
            let t = UnrankedTree::node(Label::of("f"), &vec![UnrankedTree::leaf(Label::of("a")); 1 << n]);
            let d = build_compressed_dag(&t);
            assert_eq!(d.size(), 2 * n);
            let g = check(&d, &t);
            let s = eliminate_helpers(&g);
            assert_eq!(s.size(), 3 * n - 1, "n = {n}");
            assert_eq!(s.unfold_binary(UNFOLD_BUDGET).unwrap(), fcns(std::slice::from_ref(&t)));
            assert_eq!(simplify(&g).size(), 3 * n - 2);
            // Â_i(y) -> Â_{i+1}(Â_{i+1}(y))
            let doubling = s.rules().iter().filter(|r| {
                let p: Vec<_> = r.rhs.preorder().collect();
                r.rank == 1
                    && p.len() == 3
                    && matches!((p[0], p[1]), ((SltSym::N(a), 1), (SltSym::N(b), 1)) if a == b)
            });
            assert_eq!(doubling.count(), n - 2);
        }
    }

    #[test]
    fn plain_dags() {
        for s in ["f(a,b)", "f(f(g(a),g(a)),g(a),g(a))", "a", "f(a(b),a(b),a(c))",
                  "f(a,g(a,a,a),h(a,a,b),f(g(a,a,a),h(a,a,b)),g(a,a,a),h(a,a,b),c)"] {
            let t = parse_term(s).unwrap();
            check(&build_compressed_dag(&t), &t);
        }
    }

    #[test]
    fn hdag_conversion() {
        let t = parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap();
        let h = HybridDag::build(&t, Orientation::Fcns).unwrap();
        for d in [h.to_compressed_dag(), h.normalize_right_regular().unwrap()] {
            let g = hdag_to_one_slt(&d).unwrap();
            assert!(g.max_rank() <= 1);
            assert!(g.size() <= d.size() + 2 * d.node_count());
            assert_eq!(g.unfold_binary(100).unwrap(), fcns(std::slice::from_ref(&t)));
        }
        let g = hdag_to_one_slt(&h.to_compressed_dag()).unwrap();
        assert!(g.size() <= 5 + 2 * 4, "{}", g.size());
        let u = parse_term("f(f(g(a),g(a)),f(g(a),g(a),b))").unwrap();
        let lcps = HybridDag::build(&u, Orientation::Lcps).unwrap().to_compressed_dag();
        assert_eq!(lcps.unfold(100).unwrap(), u);
        assert_eq!(hdag_to_one_slt(&lcps), Err(Error::NotRightRegular));
    }
}
