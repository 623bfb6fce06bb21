//! Exact accumulated sizes of minimal dags over all m-labeled trees of a
//! given edge size, from generating functions, with an enumeration oracle.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dag::{minimize, minimize_binary};
use crate::enumerate::{binary_with_edges, unranked_with_edges};
use crate::error::{Error, Result};
use crate::random::alphabet;
use crate::tree::{BinaryTree, UnrankedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Binary,
    Unranked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Nodes,
    Edges,
}

impl FromStr for Class {
    type Err = Error;
    fn from_str(s: &str) -> Result<Class> {
        match s {
            "binary" => Ok(Class::Binary),
            "unranked" => Ok(Class::Unranked),
            _ => Err(Error::InvalidArgument(format!("unknown class {s:?}"))),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Measure> {
        match s {
            "nodes" => Ok(Measure::Nodes),
            "edges" => Ok(Measure::Edges),
            _ => Err(Error::InvalidArgument(format!("unknown measure {s:?}"))),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Class::Binary => "binary",
            Class::Unranked => "unranked",
        })
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Measure::Nodes => "nodes",
            Measure::Edges => "edges",
        })
    }
}

/// A power series truncated after `z^order`, with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    c: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> TruncatedSeries {
        TruncatedSeries { c: vec![BigRational::zero(); order + 1] }
    }

    /// Coefficients beyond `order` are dropped, missing ones are zero.
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> TruncatedSeries {
        coeffs.resize(order + 1, BigRational::zero());
        TruncatedSeries { c: coeffs }
    }

    pub fn from_integers(coeffs: &[i64], order: usize) -> TruncatedSeries {
        TruncatedSeries::new(coeffs.iter().map(|&x| rat(x)).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.c[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// Adds `a·z^k` in place; no effect beyond the order.
    pub fn add_monomial(&mut self, k: usize, a: &BigRational) {
        if let Some(x) = self.c.get_mut(k) {
            *x += a;
        }
    }

    pub fn add(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(o.order());
        TruncatedSeries { c: (0..=n).map(|k| &self.c[k] + &o.c[k]).collect() }
    }

    pub fn sub(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(o.order());
        TruncatedSeries { c: (0..=n).map(|k| &self.c[k] - &o.c[k]).collect() }
    }

    pub fn mul(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(o.order());
        let mut c = vec![BigRational::zero(); n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        TruncatedSeries { c }
    }

    pub fn scale(&self, a: &BigRational) -> TruncatedSeries {
        TruncatedSeries { c: self.c.iter().map(|x| x * a).collect() }
    }

    /// Division by `z^k`; the order drops by `k`.
    pub fn div_monomial(&self, k: usize) -> Result<TruncatedSeries> {
        if k > self.order() || self.c[..k].iter().any(|x| !x.is_zero()) {
            return Err(Error::InvalidArgument(format!("series is not divisible by z^{k}")));
        }
        Ok(TruncatedSeries { c: self.c[k..].to_vec() })
    }

    /// Square root with constant term 1 via the recurrence from `y² = f`.
    pub fn sqrt(&self) -> Result<TruncatedSeries> {
        if !self.c[0].is_one() {
            return Err(Error::InvalidArgument("square root needs constant term 1".into()));
        }
        let mut y = vec![BigRational::one()];
        self.extend_sqrt(&mut y);
        Ok(TruncatedSeries { c: y })
    }

    /// Continues a square root whose first coefficients are already known,
    /// e.g. from a series that agrees with `self` on them.
    pub fn sqrt_from_prefix(&self, prefix: &[BigRational]) -> Result<TruncatedSeries> {
        if prefix.first().is_none_or(|c| !c.is_one()) || !self.c[0].is_one() {
            return Err(Error::InvalidArgument("square root needs constant term 1".into()));
        }
        let mut y = prefix[..prefix.len().min(self.c.len())].to_vec();
        self.extend_sqrt(&mut y);
        Ok(TruncatedSeries { c: y })
    }

    fn extend_sqrt(&self, y: &mut Vec<BigRational>) {
        if !self.extend_sqrt_integral(y) {
            extend_sqrt_rational(&self.c, y);
        }
    }

    /// Integer run of the recurrence; gives up (leaving `y` untouched) as
    /// soon as a coefficient is not integral.
    fn extend_sqrt_integral(&self, y: &mut Vec<BigRational>) -> bool {
        let Some(f) = self.to_integers() else { return false };
        let known: Option<Vec<BigInt>> = y.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
        let Some(mut w) = known else { return false };
        let two = BigInt::from(2);
        for k in w.len()..f.len() {
            let mut cross = BigInt::zero();
            for i in 1..=(k - 1) / 2 {
                cross += &w[i] * &w[k - i];
            }
            let mut s = &f[k] - cross * &two;
            if k % 2 == 0 {
                s -= &w[k / 2] * &w[k / 2];
            }
            let (q, r) = s.div_rem(&two);
            if !r.is_zero() {
                return false;
            }
            w.push(q);
        }
        *y = w.into_iter().map(BigRational::from_integer).collect();
        true
    }

    /// The coefficients as integers, if all are integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.c.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
    }
}

fn extend_sqrt_rational(f: &[BigRational], y: &mut Vec<BigRational>) {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in y.len()..f.len() {
        let mut s = f[k].clone();
        for i in 1..=(k - 1) / 2 {
            s -= (&y[i] * &y[k - i]) * BigInt::from(2);
        }
        if k % 2 == 0 {
            s -= &y[k / 2] * &y[k / 2];
        }
        y.push(s * &half);
    }
}

/// `B_{m,p}` (binary) or `T_{m,p}` (unranked): number of m-labeled trees with `p` edges.
pub fn tree_count(class: Class, m: u32, p: usize) -> BigUint {
    let catalan = |k: usize| binomial(2 * k, k) / BigUint::from(k + 1);
    let shapes = match class {
        Class::Binary => catalan(p + 1),
        Class::Unranked => catalan(p),
    };
    shapes * BigUint::from(m).pow(p as u32 + 1)
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// `√(1 − 4mz)` to the given order, shared by all containment series.
fn base_root(m: u32, order: usize) -> TruncatedSeries {
    TruncatedSeries::from_integers(&[1, -4 * m as i64], order).sqrt().unwrap()
}

fn containment_with(class: Class, m: u32, p: usize, order: usize, root: &TruncatedSeries) -> TruncatedSeries {
    let mi = BigInt::from(m);
    match class {
        Class::Binary => {
            // (√(1 − 4mz + 4mz^{p+2}) − √(1 − 4mz)) / (2mz²)
            let mut f = TruncatedSeries::from_integers(&[1, -4 * m as i64], order + 2);
            f.add_monomial(p + 2, &BigRational::from_integer(&mi * 4));
            let k0 = (p + 2).min(order + 3);
            let s = f.sqrt_from_prefix(&root.c[..k0]).unwrap();
            s.sub(root)
                .div_monomial(2)
                .unwrap()
                .scale(&BigRational::new(BigInt::one(), mi * 2))
        }
        Class::Unranked => {
            // (z^{p+1} + √(1 − 4mz + 2z^{p+1} + z^{2p+2}) − √(1 − 4mz)) / (2z)
            let mut f = TruncatedSeries::from_integers(&[1, -4 * m as i64], order + 1);
            f.add_monomial(p + 1, &rat(2));
            f.add_monomial(2 * p + 2, &rat(1));
            let k0 = (p + 1).min(order + 2);
            let mut s = f.sqrt_from_prefix(&root.c[..k0]).unwrap().sub(root);
            s.add_monomial(p + 1, &rat(1));
            s.div_monomial(1).unwrap().scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
        }
    }
}

/// Generating function of the number of m-labeled trees that contain a
/// fixed tree with `p` edges as a subtree, by edge size.
pub fn containment_series(class: Class, m: u32, p: usize, order: usize) -> TruncatedSeries {
    let extra = if class == Class::Binary { 2 } else { 1 };
    containment_with(class, m, p, order, &base_root(m, order + extra))
}

/// Sum of root out-degrees over all m-labeled trees with `p` edges.
fn edge_weight(class: Class, m: u32, p: usize) -> BigRational {
    let count = BigRational::from_integer(BigInt::from(tree_count(class, m, p)));
    let p = p as i64;
    match class {
        Class::Binary => count * BigRational::new((3 * p).into(), (2 * p + 1).into()),
        Class::Unranked => count * BigRational::new((3 * p).into(), (p + 2).into()),
    }
}

/// Accumulated dag sizes and tree counts for every edge size `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    pub class: Class,
    pub m: u32,
    pub nodes: Vec<BigInt>,
    pub edges: Vec<BigInt>,
    pub counts: Vec<BigInt>,
}

impl CensusTable {
    pub fn accumulated(&self, n: usize, measure: Measure) -> &BigInt {
        match measure {
            Measure::Nodes => &self.nodes[n],
            Measure::Edges => &self.edges[n],
        }
    }

    pub fn result(&self, n: usize, measure: Measure) -> CensusResult {
        let accumulated = self.accumulated(n, measure).clone();
        let count = self.counts[n].clone();
        CensusResult {
            class: self.class,
            m: self.m,
            n,
            measure,
            average: BigRational::new(accumulated.clone(), count.clone()),
            accumulated,
            count,
        }
    }
}

/// `Σ_p |U_p| · C_p(z)` for nodes and `Σ_p w_p · C_p(z)` for edges, where
/// `w_p` sums the root degrees of the trees with `p` edges. The terms with
/// `p > n` have valuation above `n` and are left out.
///
/// Panics if a coefficient fails to be a nonnegative integer, which would
/// mean an arithmetic error.
pub fn table(class: Class, m: u32, n: usize) -> CensusTable {
    assert!(m >= 1, "at least one label");
    let extra = if class == Class::Binary { 2 } else { 1 };
    let root = base_root(m, n + extra);
    let mut nodes = vec![BigInt::zero(); n + 1];
    let mut edges = vec![BigInt::zero(); n + 1];
    for p in 0..=n {
        let c = containment_with(class, m, p, n, &root);
        let ints = c.to_integers().expect("containment counts are integers");
        assert!(ints.iter().all(|x| !x.is_negative()), "containment counts are nonnegative");
        assert!(ints[..p].iter().all(Zero::is_zero), "no tree smaller than p contains one of size p");
        let count = BigInt::from(tree_count(class, m, p));
        let weight = edge_weight(class, m, p);
        assert!(weight.is_integer(), "root degree sums are integers");
        let weight = weight.to_integer();
        for k in p..=n {
            nodes[k] += &count * &ints[k];
            edges[k] += &weight * &ints[k];
        }
    }
    CensusTable {
        class,
        m,
        nodes,
        edges,
        counts: (0..=n).map(|k| BigInt::from(tree_count(class, m, k))).collect(),
    }
}

pub fn accumulated(class: Class, m: u32, n: usize, measure: Measure) -> BigInt {
    table(class, m, n).accumulated(n, measure).clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusResult {
    pub class: Class,
    pub m: u32,
    pub n: usize,
    pub measure: Measure,
    pub accumulated: BigInt,
    pub count: BigInt,
    pub average: BigRational,
}

/// Decimal expansion truncated to `digits` fractional digits.
pub fn decimal(x: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (x * BigRational::from_integer(scale.clone())).floor().to_integer();
    let (int, frac) = scaled.div_mod_floor(&scale);
    if digits == 0 {
        return int.to_string();
    }
    format!("{int}.{:0>width$}", frac.to_string(), width = digits)
}

/// Largest instance the enumeration oracle accepts.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Sums the dag measure over every m-labeled tree with `n` edges.
pub fn brute_force(class: Class, m: u32, n: usize, measure: Measure) -> Result<BigInt> {
    let total = tree_count(class, m, n);
    if total > BigUint::from(BRUTE_FORCE_LIMIT) {
        return Err(Error::TooLarge(format!("{total} trees exceed the enumeration limit")));
    }
    let labels = alphabet(m as usize);
    let one = &labels[..1];
    let mut sum = 0u64;
    let nodes = n + 1;
    let assignments = (m as u64).pow(nodes as u32);
    let label_word = |mut code: u64| {
        (0..nodes)
            .map(|_| {
                let l = labels[(code % m as u64) as usize];
                code /= m as u64;
                l
            })
            .collect::<Vec<_>>()
    };
    match class {
        Class::Unranked => {
            for shape in unranked_with_edges(n, one) {
                let arities: Vec<u32> = (0..nodes as u32).map(|v| shape.arity(v) as u32).collect();
                for code in 0..assignments {
                    let t = UnrankedTree::from_preorder(label_word(code), arities.clone())?;
                    let d = minimize(&t);
                    sum += match measure {
                        Measure::Nodes => d.nodes(),
                        Measure::Edges => d.edges(),
                    } as u64;
                }
            }
        }
        Class::Binary => {
            for shape in binary_with_edges(n, one) {
                let left: Vec<Option<u32>> = (0..nodes as u32).map(|v| shape.left(v)).collect();
                let right: Vec<Option<u32>> = (0..nodes as u32).map(|v| shape.right(v)).collect();
                for code in 0..assignments {
                    let t = BinaryTree::from_parts(&label_word(code), &left, &right, Some(0))?;
                    let d = minimize_binary(&t);
                    sum += match measure {
                        Measure::Nodes => d.nodes(),
                        Measure::Edges => d.edges(),
                    } as u64;
                }
            }
        }
    }
    Ok(BigInt::from(sum))
}

/// `κ_m = √(ln(4m)/π)`.
pub fn kappa(m: u32) -> f64 {
    ((4.0 * m as f64).ln() / std::f64::consts::PI).sqrt()
}

/// Leading term `c·κ_m·n/√(ln n)` of the average dag size, with `c` equal
/// to 2 (binary nodes), 3 (binary or unranked edges) or 1 (unranked nodes).
pub fn asymptotic_prediction(class: Class, m: u32, n: usize, measure: Measure) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("the prediction needs n ≥ 2".into()));
    }
    let c = match (class, measure) {
        (Class::Binary, Measure::Nodes) => 2.0,
        (Class::Unranked, Measure::Nodes) => 1.0,
        (_, Measure::Edges) => 3.0,
    };
    let n = n as f64;
    Ok(c * kappa(m) * n / n.ln().sqrt())
}

/// The average as a float, for trend checks.
pub fn average_f64(r: &CensusResult) -> f64 {
    let digits = decimal(&r.average, 12);
    digits.parse().unwrap_or_else(|_| r.average.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let b: Vec<u64> = (0..3).map(|p| tree_count(Class::Binary, 1, p).try_into().unwrap()).collect();
        assert_eq!(b, vec![1, 2, 5]);
        assert_eq!(tree_count(Class::Unranked, 1, 3), BigUint::from(5u32));
        assert_eq!(tree_count(Class::Unranked, 2, 1), BigUint::from(4u32));
    }

    #[test]
    fn sqrt_squares_back() {
        let f = TruncatedSeries::from_integers(&[1, 3, -2, 7, 0, 5], 8);
        let y = f.sqrt().unwrap();
        assert_eq!(y.mul(&y), f);
        assert!(TruncatedSeries::from_integers(&[2, 1], 3).sqrt().is_err());
        let r = base_root(1, 6).to_integers().unwrap();
        let want: Vec<BigInt> = [1, -2, -2, -4, -10, -28, -84].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(r, want);
    }

    #[test]
    fn containment_small() {
        let c = containment_series(Class::Binary, 1, 0, 10);
        for n in 0..=10 {
            assert_eq!(c.coeff(n).to_integer(), BigInt::from(tree_count(Class::Binary, 1, n)));
        }
        let c = containment_series(Class::Unranked, 1, 1, 4);
        // a(a(a)) has the subtree a(a), a(a,a) does not
        assert_eq!(c.coeff(2).to_integer(), BigInt::from(1));
        for p in 0..5 {
            for class in [Class::Binary, Class::Unranked] {
                let c = containment_series(class, 2, p, 8);
                assert!(c.coeffs()[..p].iter().all(Zero::is_zero));
                assert!(!c.coeff(p).is_zero());
            }
        }
    }

    #[test]
    fn small_values() {
        assert_eq!(accumulated(Class::Unranked, 1, 2, Measure::Nodes), BigInt::from(5));
        assert_eq!(accumulated(Class::Unranked, 1, 2, Measure::Edges), BigInt::from(4));
        for class in [Class::Binary, Class::Unranked] {
            for m in 1..4 {
                let t = table(class, m, 0);
                assert_eq!(t.nodes[0], BigInt::from(m));
                assert_eq!(t.edges[0], BigInt::zero());
            }
        }
        assert_eq!(brute_force(Class::Binary, 1, 1, Measure::Nodes).unwrap(), BigInt::from(4));
        assert_eq!(brute_force(Class::Unranked, 2, 1, Measure::Nodes).unwrap(), BigInt::from(8));
    }

    #[test]
    fn matches_enumeration_small() {
        for class in [Class::Binary, Class::Unranked] {
            let t = table(class, 2, 4);
            for n in 0..=4 {
                for measure in [Measure::Nodes, Measure::Edges] {
                    assert_eq!(t.accumulated(n, measure), &brute_force(class, 2, n, measure).unwrap());
                }
            }
        }
    }

    #[test]
    fn decimals_and_prediction() {
        assert_eq!(decimal(&BigRational::new(5.into(), 2.into()), 3), "2.500");
        assert_eq!(decimal(&BigRational::new(2.into(), 3.into()), 4), "0.6666");
        assert!((kappa(1) - 0.6643).abs() < 1e-3);
        let p = asymptotic_prediction(Class::Binary, 1, 100, Measure::Nodes).unwrap();
        assert!((p - 2.0 * kappa(1) * 100.0 / 100f64.ln().sqrt()).abs() < 1e-9);
        assert!(asymptotic_prediction(Class::Binary, 1, 1, Measure::Nodes).is_err());
        assert!(brute_force(Class::Binary, 4, 20, Measure::Nodes).is_err());
    }
}
