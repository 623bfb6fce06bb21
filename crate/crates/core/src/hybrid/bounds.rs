//! The worst-case size relations between dag, bdag and hdag as checks.

use std::fmt;

use crate::dag::{minimize, minimize_binary};
use crate::encode::{fcns, lcps};
use crate::hybrid::{HybridDag, Orientation};
use crate::tree::UnrankedTree;

/// Edge sizes of every representation of one tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Sizes {
    pub tree: usize,
    pub dag: usize,
    pub bdag: usize,
    pub rbdag: usize,
    pub hdag: usize,
    pub rhdag: usize,
    /// Non-leaf nodes of the minimal dag.
    pub nonleaf: usize,
}

impl Sizes {
    pub fn of(t: &UnrankedTree) -> Sizes {
        let d = minimize(t);
        let forest = std::slice::from_ref(t);
        let bdag = minimize_binary(&fcns(forest)).edges();
        let rbdag = minimize_binary(&lcps(forest)).edges();
        let nonleaf = (0..d.nodes() as u32).filter(|&v| !d.is_leaf(v)).count();
        let (hdag, rhdag) = if t.edges() == 0 {
            (0, 0)
        } else {
            (
                HybridDag::from_dag(&d, Orientation::Fcns).unwrap().edges(),
                HybridDag::from_dag(&d, Orientation::Lcps).unwrap().edges(),
            )
        };
        Sizes {
            tree: t.edges(),
            dag: d.edges(),
            bdag,
            rbdag,
            hdag,
            rhdag,
            nonleaf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub relation: &'static str,
    pub lhs: u128,
    pub rhs: u128,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {:<34} {} <= {} {}",
            self.name,
            self.relation,
            self.lhs,
            self.rhs,
            if self.holds() { "ok" } else { "VIOLATED" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub sizes: Sizes,
    pub checks: Vec<BoundCheck>,
    pub notices: Vec<String>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        for n in &self.notices {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

pub fn check_sizes(s: Sizes) -> BoundsReport {
    let w = |x: usize| x as u128;
    let mut checks = vec![
        BoundCheck {
            name: "hdag-min",
            relation: "|hdag| <= min(|dag|, |bdag|)",
            lhs: w(s.hdag),
            rhs: w(s.dag.min(s.bdag)),
        },
        BoundCheck {
            name: "hdag-min-rev",
            relation: "|rhdag| <= min(|dag|, |rbdag|)",
            lhs: w(s.rhdag),
            rhs: w(s.dag.min(s.rbdag)),
        },
        BoundCheck {
            name: "bdag-twice",
            relation: "|bdag| + n <= 2|hdag|",
            lhs: w(s.bdag + s.nonleaf),
            rhs: 2 * w(s.hdag),
        },
        BoundCheck {
            name: "bdag-twice-rev",
            relation: "|rbdag| + n <= 2|rhdag|",
            lhs: w(s.rbdag + s.nonleaf),
            rhs: 2 * w(s.rhdag),
        },
        BoundCheck {
            name: "bdag-vs-dag",
            relation: "|bdag| <= 2|dag|",
            lhs: w(s.bdag),
            rhs: 2 * w(s.dag),
        },
    ];
    let mut notices = Vec::new();
    if s.tree >= 2 {
        checks.extend([
            BoundCheck {
                name: "dag-square",
                relation: "2|dag| <= |hdag|^2",
                lhs: 2 * w(s.dag),
                rhs: w(s.hdag) * w(s.hdag),
            },
            BoundCheck {
                name: "dag-square-rev",
                relation: "2|dag| <= |rhdag|^2",
                lhs: 2 * w(s.dag),
                rhs: w(s.rhdag) * w(s.rhdag),
            },
            BoundCheck {
                name: "dag-vs-bdag-square",
                relation: "2|dag| <= |bdag|^2",
                lhs: 2 * w(s.dag),
                rhs: w(s.bdag) * w(s.bdag),
            },
        ]);
    } else {
        notices.push(format!(
            "squared bounds skipped: the tree has {} edge(s), they need at least 2",
            s.tree
        ));
    }
    BoundsReport {
        sizes: s,
        checks,
        notices,
    }
}

pub fn check_bounds(t: &UnrankedTree) -> BoundsReport {
    check_sizes(Sizes::of(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_term;

    #[test]
    fn sample_report() {
        let r = check_bounds(&parse_term("f(f(g(a),g(a)),g(a),g(a))").unwrap());
        assert!(r.all_hold());
        let s = r.sizes;
        assert_eq!((s.tree, s.dag, s.bdag, s.hdag, s.nonleaf), (9, 6, 6, 5, 3));
    }

    #[test]
    fn tiny_trees_skip_squared() {
        let r = check_bounds(&parse_term("a(b)").unwrap());
        assert!(r.all_hold());
        assert_eq!(r.notices.len(), 1);
        assert_eq!(r.checks.len(), 5);
    }
}
