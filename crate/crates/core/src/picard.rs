//! Picard lattice of `X = (P^n1)^2 x ... x (P^ns)^2`, its truncated
//! intersection ring, and degree/slope arithmetic against a polarization.
//!
//! Slots are ordered `(1,1),(1,2),(2,1),(2,2),...,(s,1),(s,2)`; slot `j`
//! belongs to factor pair `j / 2` and has that pair's dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The multiprojective space, described by the dimensions `n_1..n_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceSpec {
    dims: Vec<u32>,
}

impl SpaceSpec {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("need at least one factor pair".into()));
        }
        if let Some(i) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidSpace(format!("n_{} must be at least 1", i + 1)));
        }
        Ok(Self { dims })
    }

    /// Number of factor pairs.
    pub fn s(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// Number of Picard slots, `2s`.
    pub fn slots(&self) -> usize {
        2 * self.dims.len()
    }

    /// Dimension of the projective factor behind slot `j`.
    pub fn slot_dim(&self, j: usize) -> u32 {
        self.dims[j / 2]
    }

    pub fn slot_dims(&self) -> Vec<u32> {
        (0..self.slots()).map(|j| self.slot_dim(j)).collect()
    }

    /// Total dimension `D = 2 * sum(n_i)`.
    pub fn total_dim(&self) -> u32 {
        2 * self.dims.iter().sum::<u32>()
    }

    pub fn check_twist(&self, t: &Twist) -> Result<()> {
        if t.len() != self.slots() {
            return Err(Error::TwistLength {
                expected: self.slots(),
                got: t.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| format!("(P^{n})^2")).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// An element of `Pic(X) = Z^{2s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Twist(Vec<i64>);

impl Twist {
    pub fn new(components: Vec<i64>) -> Self {
        Self(components)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// The unit vector `e_j`.
    pub fn unit(len: usize, j: usize) -> Self {
        let mut v = vec![0; len];
        v[j] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn scale(&self, c: i64) -> Self {
        Self(self.0.iter().map(|a| a * c).collect())
    }

    /// Parses `"-2,-2"` or `"(1, 0)"`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        if trimmed.trim().is_empty() {
            return Err("empty twist".into());
        }
        trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|e| format!("bad twist component {p:?}: {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl std::ops::Index<usize> for Twist {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

impl Add for &Twist {
    type Output = Twist;
    fn add(self, rhs: &Twist) -> Twist {
        assert_eq!(self.len(), rhs.len(), "twist length mismatch");
        Twist(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Twist {
    type Output = Twist;
    fn sub(self, rhs: &Twist) -> Twist {
        assert_eq!(self.len(), rhs.len(), "twist length mismatch");
        Twist(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The ample class `L = O(a_1,a_1,...,a_s,a_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polarization {
    alphas: Vec<u32>,
}

impl Polarization {
    /// Every `alpha_i` must be at least 1; zero would not give an ample class.
    pub fn new(alphas: Vec<u32>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidPolarization("no alphas given".into()));
        }
        if let Some(i) = alphas.iter().position(|&a| a == 0) {
            return Err(Error::InvalidPolarization(format!(
                "alpha_{} = 0 is not ample",
                i + 1
            )));
        }
        Ok(Self { alphas })
    }

    pub fn uniform(s: usize, alpha: u32) -> Result<Self> {
        Self::new(vec![alpha; s])
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    /// The twist `(a_1,a_1,...,a_s,a_s)`.
    pub fn expansion(&self) -> Twist {
        Twist(
            self.alphas
                .iter()
                .flat_map(|&a| [i64::from(a), i64::from(a)])
                .collect(),
        )
    }

    pub fn check_space(&self, space: &SpaceSpec) -> Result<()> {
        if self.alphas.len() != space.s() {
            return Err(Error::InvalidPolarization(format!(
                "{} alphas for s = {}",
                self.alphas.len(),
                space.s()
            )));
        }
        Ok(())
    }
}

/// A class in `Z[h_1..h_2s] / (h_j^{n(j)+1})`.
///
/// Every product is reduced immediately, so the number of stored terms never
/// exceeds `prod (n(j)+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowClass {
    slot_dims: Vec<u32>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl ChowClass {
    pub fn zero(space: &SpaceSpec) -> Self {
        Self {
            slot_dims: space.slot_dims(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: &SpaceSpec) -> Self {
        let mut c = Self::zero(space);
        c.terms.insert(vec![0; space.slots()], BigInt::one());
        c
    }

    /// The hyperplane class `h_j`.
    pub fn generator(space: &SpaceSpec, j: usize) -> Self {
        let mut c = Self::zero(space);
        let mut e = vec![0; space.slots()];
        e[j] = 1;
        c.insert(e, BigInt::one());
        c
    }

    /// The divisor class `sum_j b_j h_j`.
    pub fn divisor(space: &SpaceSpec, b: &Twist) -> Self {
        let mut c = Self::zero(space);
        for (j, &bj) in b.components().iter().enumerate() {
            if bj != 0 {
                let mut e = vec![0; space.slots()];
                e[j] = 1;
                c.insert(e, BigInt::from(bj));
            }
        }
        c
    }

    /// Builds a class from raw exponent vectors, reducing on the way in.
    pub fn from_terms(space: &SpaceSpec, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut c = Self::zero(space);
        for (e, v) in terms {
            c.insert(e, v);
        }
        c
    }

    fn insert(&mut self, exps: Vec<u32>, value: BigInt) {
        if value.is_zero() || exps.iter().zip(&self.slot_dims).any(|(e, n)| e > n) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(value);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += value;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_reduced(&self) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().zip(&self.slot_dims).all(|(a, n)| a <= n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, v) in &other.terms {
            out.insert(e.clone(), v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self {
            slot_dims: self.slot_dims.clone(),
            terms: BTreeMap::new(),
        };
        for (ea, va) in &self.terms {
            for (eb, vb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, va * vb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self {
            slot_dims: self.slot_dims.clone(),
            terms: BTreeMap::from([(vec![0; self.slot_dims.len()], BigInt::one())]),
        };
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// Coefficient of the top class `prod_j h_j^{n(j)}`.
pub fn top_coefficient(space: &SpaceSpec, cls: &ChowClass) -> BigInt {
    cls.coefficient(&space.slot_dims())
}

/// The linear functional `B -> c1(O(B)) . L^{D-1}`, stored by its slot weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeForm {
    weights: Vec<BigInt>,
}

impl DegreeForm {
    pub fn new(space: &SpaceSpec, pol: &Polarization) -> Result<Self> {
        pol.check_space(space)?;
        let l = ChowClass::divisor(space, &pol.expansion());
        let l_pow = l.pow(space.total_dim() - 1);
        let weights = (0..space.slots())
            .map(|j| top_coefficient(space, &ChowClass::generator(space, j).mul(&l_pow)))
            .collect();
        Ok(Self { weights })
    }

    /// `delta(e_j)` for every slot.
    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn eval(&self, b: &Twist) -> BigInt {
        self.weights
            .iter()
            .zip(b.components())
            .map(|(w, &c)| w * BigInt::from(c))
            .sum()
    }

    /// `d = delta(1,0,...,0)`.
    pub fn d(&self) -> &BigInt {
        &self.weights[0]
    }
}

/// `delta_L(B) = c1(O(B)) . L^{D-1}`.
pub fn delta(space: &SpaceSpec, pol: &Polarization, b: &Twist) -> Result<BigInt> {
    space.check_twist(b)?;
    Ok(DegreeForm::new(space, pol)?.eval(b))
}

/// Rank, first Chern class, degree and slope of a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleInvariants {
    pub rank: u64,
    pub c1: Twist,
    pub degree: BigInt,
    pub slope: BigRational,
}

pub fn degree_and_slope(
    space: &SpaceSpec,
    pol: &Polarization,
    rank: u64,
    c1: &Twist,
) -> Result<BundleInvariants> {
    let form = DegreeForm::new(space, pol)?;
    invariants_with(&form, space, rank, c1)
}

/// Same as [`degree_and_slope`] with a precomputed degree form.
pub fn invariants_with(
    form: &DegreeForm,
    space: &SpaceSpec,
    rank: u64,
    c1: &Twist,
) -> Result<BundleInvariants> {
    if rank == 0 {
        return Err(Error::ZeroRank);
    }
    space.check_twist(c1)?;
    let degree = form.eval(c1);
    let slope = BigRational::new(degree.clone(), BigInt::from(rank));
    Ok(BundleInvariants {
        rank,
        c1: c1.clone(),
        degree,
        slope,
    })
}

/// Result of normalizing `E` to `E(-k_E,0,...,0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub k: BigInt,
    pub normalized_degree: BigInt,
}

/// `k_E = ceil(slope / d)` together with `deg E(-k_E,0,...,0)`; the result
/// always lands in the window `1 - d*rk <= deg <= 0`.
pub fn normalize(space: &SpaceSpec, pol: &Polarization, inv: &BundleInvariants) -> Result<Normalization> {
    let form = DegreeForm::new(space, pol)?;
    normalize_with(&form, inv)
}

pub fn normalize_with(form: &DegreeForm, inv: &BundleInvariants) -> Result<Normalization> {
    let d = form.d().clone();
    if !d.is_positive() {
        return Err(Error::InvalidPolarization("delta(1,0,...,0) is not positive".into()));
    }
    let rank = BigInt::from(inv.rank);
    // ceil(deg / (rank * d)) with exact integer division.
    let k = ceil_div(&inv.degree, &(&rank * &d));
    let normalized_degree = &inv.degree - &k * &d * &rank;
    let low = BigInt::one() - &d * &rank;
    if normalized_degree < low || normalized_degree.is_positive() {
        return Err(Error::NormalizationWindow {
            degree: normalized_degree.to_string(),
            low: low.to_string(),
        });
    }
    Ok(Normalization {
        k,
        normalized_degree,
    })
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `ceil` of a rational.
pub(crate) fn ceil_rational(r: &BigRational) -> BigInt {
    ceil_div(r.numer(), r.denom())
}

/// Largest integer `<= r`.
pub(crate) fn floor_rational(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(d: &[u32]) -> SpaceSpec {
        SpaceSpec::new(d.to_vec()).unwrap()
    }

    fn tw(v: &[i64]) -> Twist {
        Twist::new(v.to_vec())
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(SpaceSpec::new(vec![]).is_err());
        assert!(SpaceSpec::new(vec![1, 0]).is_err());
        assert!(Polarization::new(vec![1, 0]).is_err());
        let space = sp(&[1]);
        let pol = Polarization::new(vec![1]).unwrap();
        assert_eq!(
            delta(&space, &pol, &tw(&[1, 0, 0])),
            Err(Error::TwistLength { expected: 2, got: 3 })
        );
        assert_eq!(degree_and_slope(&space, &pol, 0, &tw(&[0, 0])), Err(Error::ZeroRank));
    }

    #[test]
    fn top_coefficient_examples() {
        let space = sp(&[1]);
        let h = ChowClass::divisor(&space, &tw(&[1, 1]));
        assert_eq!(top_coefficient(&space, &h.pow(2)), BigInt::from(2));
        let h1h2 = ChowClass::generator(&space, 0).mul(&ChowClass::generator(&space, 1));
        assert_eq!(top_coefficient(&space, &h1h2), BigInt::one());

        let space = sp(&[1, 2]);
        let h = ChowClass::divisor(&space, &tw(&[1, 1, 1, 1]));
        assert_eq!(top_coefficient(&space, &h.pow(6)), BigInt::from(180));
        // lower-degree classes have no top term
        assert_eq!(top_coefficient(&space, &h.pow(5)), BigInt::zero());
    }

    #[test]
    fn reduction_truncates() {
        let space = sp(&[1]);
        let h1 = ChowClass::generator(&space, 0);
        assert!(h1.mul(&h1).terms().next().is_none());
        assert!(h1.pow(1).is_reduced());
    }

    #[test]
    fn delta_examples() {
        let space = sp(&[1]);
        let pol = Polarization::new(vec![1]).unwrap();
        assert_eq!(delta(&space, &pol, &tw(&[1, 0])).unwrap(), BigInt::one());
        assert_eq!(delta(&space, &pol, &tw(&[0, 0])).unwrap(), BigInt::zero());

        let space = sp(&[1, 2]);
        let pol = Polarization::new(vec![1, 1]).unwrap();
        assert_eq!(delta(&space, &pol, &tw(&[1, 0, 0, 0])).unwrap(), BigInt::from(30));
    }

    #[test]
    fn degree_and_slope_examples() {
        let space = sp(&[1]);
        let pol = Polarization::new(vec![1]).unwrap();
        let inv = degree_and_slope(&space, &pol, 3, &tw(&[-3, -3])).unwrap();
        assert_eq!(inv.degree, BigInt::from(-6));
        assert_eq!(inv.slope, BigRational::from_integer(BigInt::from(-2)));

        let inv = degree_and_slope(&space, &pol, 4, &tw(&[-2, -2])).unwrap();
        assert_eq!(inv.degree, BigInt::from(-4));
        assert_eq!(inv.slope, BigRational::from_integer(BigInt::from(-1)));

        let inv = degree_and_slope(&space, &pol, 7, &tw(&[0, 0])).unwrap();
        assert!(inv.degree.is_zero() && inv.slope.is_zero());
    }

    #[test]
    fn normalize_examples() {
        let space = sp(&[1]);
        let pol = Polarization::new(vec![1]).unwrap();
        let inv = degree_and_slope(&space, &pol, 3, &tw(&[-3, -3])).unwrap();
        let n = normalize(&space, &pol, &inv).unwrap();
        assert_eq!((n.k, n.normalized_degree), (BigInt::from(-2), BigInt::zero()));

        let inv = degree_and_slope(&space, &pol, 3, &tw(&[-2, -2])).unwrap();
        let n = normalize(&space, &pol, &inv).unwrap();
        assert_eq!((n.k, n.normalized_degree), (BigInt::from(-1), BigInt::from(-1)));

        let inv = degree_and_slope(&space, &pol, 5, &tw(&[0, 0])).unwrap();
        let n = normalize(&space, &pol, &inv).unwrap();
        assert_eq!((n.k, n.normalized_degree), (BigInt::zero(), BigInt::zero()));
    }

    #[test]
    fn twist_parse_and_display() {
        assert_eq!(Twist::parse("-2, -2").unwrap(), tw(&[-2, -2]));
        assert_eq!(Twist::parse("(1,0)").unwrap(), tw(&[1, 0]));
        assert!(Twist::parse("").is_err());
        assert!(Twist::parse("1,x").is_err());
        assert_eq!(tw(&[1, -1]).to_string(), "(1,-1)");
    }
}
