use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{PolyMatrix, Var};
use crate::error::{Error, Result};

/// A point: values for the variables of a matrix.
pub type Assignment = BTreeMap<Var, BigRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rational,
    /// `Z/pZ`; `p` must be prime.
    Prime(u64),
}

/// A dense matrix over the rationals or a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericMatrix {
    Rational(Vec<Vec<BigRational>>),
    Prime { p: u64, rows: Vec<Vec<u64>> },
}

impl NumericMatrix {
    pub fn rows(&self) -> usize {
        match self {
            NumericMatrix::Rational(r) => r.len(),
            NumericMatrix::Prime { rows, .. } => rows.len(),
        }
    }

    /// Builds a rational matrix from integer rows.
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        NumericMatrix::Rational(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Reduces integer rows modulo `p`.
    pub fn from_ints_mod(rows: &[Vec<i64>], p: u64) -> Self {
        NumericMatrix::Prime {
            p,
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
                .collect(),
        }
    }
}

pub(crate) fn reduce_mod(x: &BigRational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("reduced below p");
    let den = x.denom().mod_floor(&pb).to_u64().expect("reduced below p");
    if den == 0 {
        return Err(Error::NotInvertible(p));
    }
    Ok(mul_mod(num, inv_mod(den, p), p))
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse by Fermat; `a` must be nonzero mod prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Evaluates every entry of `m` at `point`, exactly in `field`.
pub fn evaluate(m: &PolyMatrix, point: &Assignment, field: Field) -> Result<NumericMatrix> {
    let mut values = vec![vec![BigRational::zero(); m.cols()]; m.rows()];
    for (r, c, p) in m.entries() {
        let mut acc = BigRational::zero();
        for (mono, coeff) in p.terms() {
            let mut term = coeff.clone();
            for (v, e) in mono.factors() {
                let val = point
                    .get(v)
                    .ok_or_else(|| Error::UnassignedVariable(v.to_string()))?;
                term *= num_traits::pow(val.clone(), *e as usize);
            }
            acc += term;
        }
        values[r][c] = acc;
    }
    match field {
        Field::Rational => Ok(NumericMatrix::Rational(values)),
        Field::Prime(p) => {
            let rows = values
                .iter()
                .map(|row| row.iter().map(|x| reduce_mod(x, p)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(NumericMatrix::Prime { p, rows })
        }
    }
}

/// Exact rank. Rationals go through fraction-free (Bareiss) elimination on
/// the row-wise cleared integer matrix; prime fields use plain elimination.
pub fn numeric_rank(m: &NumericMatrix) -> usize {
    match m {
        NumericMatrix::Rational(rows) => {
            let ints: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|row| {
                    let lcm = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                    row.iter()
                        .map(|x| x.numer() * (&lcm / x.denom()))
                        .collect()
                })
                .collect();
            bareiss_rank(ints)
        }
        NumericMatrix::Prime { p, rows } => mod_rank(rows.clone(), *p),
    }
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

fn mod_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_multiple_of(p)) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for i in r + 1..rows {
            let f = mul_mod(a[i][c], inv, p);
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let sub = mul_mod(f, a[r][j], p);
                a[i][j] = (a[i][j] + p - sub) % p;
            }
        }
        r += 1;
    }
    r
}

/// How a sparse rank is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Fraction-free elimination over the integers; exact over the rationals.
    Exact,
    /// Elimination modulo `p`; a lower bound for the rational rank.
    Modular(u64),
}

/// A sparse integer matrix stored by columns, each column a list of
/// `(row, value)` with distinct rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseColumns {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseColumns {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols()]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] += v;
            }
        }
        d
    }
}

/// Rank of a sparse integer matrix by incremental echelon reduction of its
/// columns.
pub fn rank_sparse(m: &SparseColumns, method: RankMethod) -> usize {
    match method {
        RankMethod::Exact => sparse_rank_exact(m),
        RankMethod::Modular(p) => sparse_rank_mod(m, p),
    }
}

fn sparse_rank_exact(m: &SparseColumns) -> usize {
    // Pivot row -> reduced column (sorted by row, leading entry first).
    let mut basis: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for col in &m.columns {
        let mut v: Vec<(usize, BigInt)> = col
            .iter()
            .filter(|(_, x)| *x != 0)
            .map(|&(r, x)| (r, BigInt::from(x)))
            .collect();
        v.sort_by_key(|(r, _)| *r);
        while let Some((lead, lead_val)) = v.first().cloned() {
            let Some(b) = basis.get(&lead) else {
                basis.insert(lead, v);
                break;
            };
            let b_lead = &b[0].1;
            v = combine(b_lead, &v, &lead_val, b);
            normalize_content(&mut v);
        }
    }
    basis.len()
}

/// `alpha * v - beta * b`, dropping zeros.
fn combine(
    alpha: &BigInt,
    v: &[(usize, BigInt)],
    beta: &BigInt,
    b: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(v.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < b.len() {
        let take_v = j >= b.len() || (i < v.len() && v[i].0 < b[j].0);
        let take_b = i >= v.len() || (j < b.len() && b[j].0 < v[i].0);
        let (row, val) = if take_v {
            i += 1;
            (v[i - 1].0, alpha * &v[i - 1].1)
        } else if take_b {
            j += 1;
            (b[j - 1].0, -(beta * &b[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (v[i - 1].0, alpha * &v[i - 1].1 - beta * &b[j - 1].1)
        };
        if !val.is_zero() {
            out.push((row, val));
        }
    }
    out
}

fn normalize_content(v: &mut [(usize, BigInt)]) {
    let g = v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if g > BigInt::one() {
        for (_, x) in v.iter_mut() {
            *x /= &g;
        }
    }
    if v.first().is_some_and(|(_, x)| x.is_negative()) {
        for (_, x) in v.iter_mut() {
            *x = -&*x;
        }
    }
}

fn sparse_rank_mod(m: &SparseColumns, p: u64) -> usize {
    let mut basis: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for col in &m.columns {
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for &(r, x) in col {
            let e = acc.entry(r).or_insert(0);
            *e = (*e + x.rem_euclid(p as i64) as u64) % p;
        }
        let mut v: Vec<(usize, u64)> = acc.into_iter().filter(|(_, x)| *x != 0).collect();
        while let Some(&(lead, lead_val)) = v.first() {
            let Some(b) = basis.get(&lead) else {
                let inv = inv_mod(lead_val, p);
                for (_, x) in v.iter_mut() {
                    *x = mul_mod(*x, inv, p);
                }
                basis.insert(lead, v);
                break;
            };
            // b is monic at its lead: v -= lead_val * b
            let mut out = Vec::with_capacity(v.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < v.len() || j < b.len() {
                let (row, val) = if j >= b.len() || (i < v.len() && v[i].0 < b[j].0) {
                    i += 1;
                    (v[i - 1].0, v[i - 1].1)
                } else if i >= v.len() || b[j].0 < v[i].0 {
                    j += 1;
                    (b[j - 1].0, (p - mul_mod(lead_val, b[j - 1].1, p)) % p)
                } else {
                    i += 1;
                    j += 1;
                    let sub = mul_mod(lead_val, b[j - 1].1, p);
                    (v[i - 1].0, (v[i - 1].1 + p - sub) % p)
                };
                if val != 0 {
                    out.push((row, val));
                }
            }
            v = out;
        }
    }
    basis.len()
}
