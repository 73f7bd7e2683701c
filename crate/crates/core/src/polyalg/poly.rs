use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Var;
use crate::error::{Error, Result};
use crate::picard::Twist;

/// A monomial as a sorted list of `(variable, exponent)` with no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn power(v: Var, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Self(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary factors, merging repeats.
    pub fn from_factors(factors: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_insert(0) += e;
        }
        Self(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Self(out)
    }

    /// Per-slot total degree for a space with `slots` Picard slots.
    pub fn multidegree(&self, slots: usize) -> Twist {
        let mut d = vec![0i64; slots];
        for (v, e) in &self.0 {
            d[v.slot()] += i64::from(*e);
        }
        Twist::new(d)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|(v, e)| format!("{v}^{e}")).collect();
        f.write_str(&parts.join("·"))
    }
}

/// Outcome of asking for a polynomial's multidegree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous(Twist),
    Inhomogeneous,
}

/// A finite sum of rational multiples of monomials; zero terms never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// `c * m` with an integer coefficient.
    pub fn monomial(c: i64, m: Monomial) -> Self {
        Self::term(BigRational::from_integer(BigInt::from(c)), m)
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(1, Monomial::var(v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `self^e` by repeated multiplication.
    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(BigRational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Common per-slot degree of all terms.
    pub fn multidegree(&self, slots: usize) -> Result<Homogeneity> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(Error::ZeroPolynomial)?.multidegree(slots);
        if it.all(|m| m.multidegree(slots) == first) {
            Ok(Homogeneity::Homogeneous(first))
        } else {
            Ok(Homogeneity::Inhomogeneous)
        }
    }

    /// All variables that occur in some term.
    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(v, _)| *v))
    }
}

impl fmt::Display for Poly {
    /// Terms in canonical order, each `±coeff` followed by `·var^e` factors,
    /// separated by single spaces. The zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let sign = if c.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}", c.abs())?;
            for (v, e) in m.factors() {
                write!(f, "·{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Poly {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut p = Self::zero();
        for tok in s.split_whitespace() {
            let (sign, rest) = match tok.chars().next() {
                Some('+') => (1, &tok[1..]),
                Some('-') => (-1, &tok[1..]),
                _ => return Err(format!("term {tok:?} lacks a sign")),
            };
            let mut pieces = rest.split('·');
            let coeff_str = pieces.next().unwrap_or_default();
            let coeff: BigRational = coeff_str
                .parse()
                .map_err(|_| format!("bad coefficient {coeff_str:?}"))?;
            let mut factors = Vec::new();
            for piece in pieces {
                let (v, e) = piece
                    .split_once('^')
                    .ok_or_else(|| format!("factor {piece:?} lacks an exponent"))?;
                let var = Var::parse(v).ok_or_else(|| format!("bad variable {v:?}"))?;
                let e: u32 = e.parse().map_err(|_| format!("bad exponent {e:?}"))?;
                factors.push((var, e));
            }
            let signed = if sign < 0 { -coeff } else { coeff };
            p.add_term(Monomial::from_factors(factors), signed);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(j: u32) -> Poly {
        Poly::var(Var::x(1, j))
    }

    fn y(j: u32) -> Poly {
        Poly::var(Var::y(1, j))
    }

    #[test]
    fn multidegree_examples() {
        assert_eq!(
            x(0).pow(2).multidegree(2).unwrap(),
            Homogeneity::Homogeneous(Twist::new(vec![2, 0]))
        );
        let p = y(1).mul(&x(0)).add(&y(0).mul(&x(1)));
        assert_eq!(
            p.multidegree(2).unwrap(),
            Homogeneity::Homogeneous(Twist::new(vec![1, 1]))
        );
        assert_eq!(x(0).add(&y(0)).multidegree(2).unwrap(), Homogeneity::Inhomogeneous);
        assert_eq!(Poly::zero().multidegree(2), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = x(0).mul(&y(1)).add(&y(1).mul(&x(0)).neg());
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn display_parse() {
        let p = x(0).pow(2).add(&y(1).mul(&x(1)).neg());
        let s = p.to_string();
        assert_eq!(s, "+1·x1_0^2 -1·x1_1^1·y1_1^1");
        assert_eq!(s.parse::<Poly>().unwrap(), p);
        let half = Poly::term(
            BigRational::new(BigInt::from(-3), BigInt::from(4)),
            Monomial::one(),
        );
        assert_eq!(half.to_string(), "-3/4");
        assert_eq!("-3/4".parse::<Poly>().unwrap(), half);
        assert!("x1_0^2".parse::<Poly>().is_err());
        assert!("+1·z1_0^1".parse::<Poly>().is_err());
    }
}
