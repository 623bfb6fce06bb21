//! Families of trees witnessing the tightness of the size bounds.

use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::tree::UnrankedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `f(g(a), …, g(a))` with `n` copies: dag `n+1`, bdag `2n`.
    Tn,
    /// `x_1` where `x_i = f(x_{i+1}, a^{n-1})` and `x_n = f(a^n)`: dag `n²`, bdag = hdag = `3n-2`.
    Sn,
    /// The dag with rules `A_i → f(A_{i+1}, …, A_n, a^n)` for `0 ≤ i ≤ n`.
    HdagGap,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "tn" => Ok(Family::Tn),
            "sn" => Ok(Family::Sn),
            "thm3" => Ok(Family::HdagGap),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Tree(UnrankedTree),
    /// Members whose unfolding is exponential are returned as dags.
    Dag(Dag),
}

pub fn tn(n: usize) -> UnrankedTree {
    let (f, g, a) = (Label::of("f"), Label::of("g"), Label::of("a"));
    let ga = UnrankedTree::node(g, &[UnrankedTree::leaf(a)]);
    UnrankedTree::node(f, &vec![ga; n])
}

pub fn sn(n: usize) -> UnrankedTree {
    let (f, a) = (Label::of("f"), UnrankedTree::leaf(Label::of("a")));
    let mut x = UnrankedTree::node(f, &vec![a.clone(); n]);
    for _ in 1..n {
        let mut kids = vec![x];
        kids.extend(std::iter::repeat_n(a.clone(), n - 1));
        x = UnrankedTree::node(f, &kids);
    }
    x
}

pub fn hdag_gap(n: usize) -> Dag {
    let (f, a) = (Label::of("f"), Label::of("a"));
    // node 0 is `a`; node 1 + (n - j) is A_j
    let mut nodes = vec![(a, Vec::new())];
    for j in (0..=n).rev() {
        let mut kids: Vec<u32> = (j + 1..=n).map(|k| (1 + n - k) as u32).collect();
        kids.extend(std::iter::repeat_n(0, n));
        nodes.push((f, kids));
    }
    let root = nodes.len() as u32 - 1;
    Dag::from_nodes(nodes, vec![root]).unwrap()
}

pub fn witness(family: Family, n: usize) -> Result<Witness> {
    if n == 0 {
        return Err(Error::InvalidArgument("family index must be at least 1".into()));
    }
    Ok(match family {
        Family::Tn => Witness::Tree(tn(n)),
        Family::Sn => Witness::Tree(sn(n)),
        Family::HdagGap => Witness::Dag(hdag_gap(n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_members() {
        assert_eq!(tn(2).to_string(), "f(g(a),g(a))");
        assert_eq!(sn(2).to_string(), "f(f(a,a),a)");
        assert_eq!(sn(3).edges(), 9);
        let d = hdag_gap(2);
        assert_eq!(d.edges(), 9);
        assert!(d.is_minimal());
    }
}
