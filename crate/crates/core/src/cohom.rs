//! Cohomology of line bundles and split bundles on products of projective
//! spaces.
//!
//! Each factor contributes the Bott numbers of `O_{P^n}(d)`, which live only
//! in degrees `0` and `n`; a line bundle on the product gets the convolution
//! of its factor tables. Tables are memoized per `(space, twist)` in a cache
//! that is safe to share between threads.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::monad::LineBundleSum;
use crate::picard::{SpaceSpec, Twist};

/// `C(a, b)` for nonnegative arguments.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `h^q(P^n, O(d))`.
pub fn bott(n: u32, d: i64, q: u32) -> BigUint {
    let n64 = i64::from(n);
    if q == 0 {
        if d >= 0 {
            binomial((n64 + d) as u64, u64::from(n))
        } else {
            BigUint::zero()
        }
    } else if q == n {
        let dual = -d - n64 - 1;
        if dual >= 0 {
            binomial((-d - 1) as u64, u64::from(n))
        } else {
            BigUint::zero()
        }
    } else {
        BigUint::zero()
    }
}

/// Dimensions `h^q` for `q = 0..=D` of a line bundle or a split bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyTable {
    pub bundle: LineBundleSum,
    pub dims: Vec<BigUint>,
}

impl CohomologyTable {
    pub fn h(&self, q: usize) -> BigUint {
        self.dims.get(q).cloned().unwrap_or_default()
    }

    pub fn all_zero(&self) -> bool {
        self.dims.iter().all(Zero::is_zero)
    }
}

type CacheKey = (Vec<u32>, Vec<i64>);

/// Memoizing cohomology engine.
#[derive(Debug, Default)]
pub struct Cohomology {
    cache: RwLock<HashMap<CacheKey, Arc<Vec<BigUint>>>>,
}

impl Cohomology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide engine used by the free functions of this module.
    pub fn global() -> &'static Cohomology {
        static ENGINE: OnceLock<Cohomology> = OnceLock::new();
        ENGINE.get_or_init(Cohomology::new)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    /// Full table `q -> h^q(X, O(a))`, `q = 0..=D`.
    pub fn line_table(&self, space: &SpaceSpec, a: &Twist) -> Result<Arc<Vec<BigUint>>> {
        space.check_twist(a)?;
        let key = (space.dims().to_vec(), a.components().to_vec());
        if let Some(hit) = self.cache.read().ok().and_then(|c| c.get(&key).cloned()) {
            return Ok(hit);
        }
        let table = Arc::new(kunneth(space, a));
        if let Ok(mut c) = self.cache.write() {
            // Another thread may have won the race; both computed the same value.
            c.entry(key).or_insert_with(|| table.clone());
        }
        Ok(table)
    }

    pub fn line_cohomology(&self, space: &SpaceSpec, a: &Twist, q: usize) -> Result<BigUint> {
        Ok(self.line_table(space, a)?.get(q).cloned().unwrap_or_default())
    }

    pub fn sum_cohomology(&self, space: &SpaceSpec, s: &LineBundleSum) -> Result<CohomologyTable> {
        let d = space.total_dim() as usize;
        let mut dims = vec![BigUint::zero(); d + 1];
        for (t, mult) in s.parts() {
            let table = self.line_table(space, t)?;
            for (acc, h) in dims.iter_mut().zip(table.iter()) {
                *acc += h * *mult;
            }
        }
        Ok(CohomologyTable {
            bundle: s.clone(),
            dims,
        })
    }

    /// `h^0` of a split bundle, skipping summands with a negative slot.
    pub fn h0_sum(&self, space: &SpaceSpec, s: &LineBundleSum) -> Result<BigUint> {
        let mut total = BigUint::zero();
        for (t, mult) in s.parts() {
            space.check_twist(t)?;
            if t.is_nonnegative() {
                total += h0_line(space, t) * *mult;
            }
        }
        Ok(total)
    }

    pub fn euler_characteristic(&self, space: &SpaceSpec, s: &LineBundleSum) -> Result<BigInt> {
        let table = self.sum_cohomology(space, s)?;
        Ok(table
            .dims
            .iter()
            .enumerate()
            .map(|(q, h)| {
                let h = BigInt::from(h.clone());
                if q % 2 == 0 {
                    h
                } else {
                    -h
                }
            })
            .sum())
    }
}

/// Product of factor `h^0`s; only meaningful when every slot is nonnegative.
fn h0_line(space: &SpaceSpec, a: &Twist) -> BigUint {
    a.components()
        .iter()
        .enumerate()
        .map(|(j, &d)| bott(space.slot_dim(j), d, 0))
        .product()
}

fn kunneth(space: &SpaceSpec, a: &Twist) -> Vec<BigUint> {
    let d = space.total_dim() as usize;
    let mut acc = vec![BigUint::zero(); d + 1];
    acc[0] = BigUint::one();
    let mut reach = 0usize;
    for (j, &aj) in a.components().iter().enumerate() {
        let n = space.slot_dim(j);
        let h0 = bott(n, aj, 0);
        let hn = bott(n, aj, n);
        let mut next = vec![BigUint::zero(); d + 1];
        for q in 0..=reach {
            if acc[q].is_zero() {
                continue;
            }
            if !h0.is_zero() {
                next[q] += &acc[q] * &h0;
            }
            if !hn.is_zero() {
                next[q + n as usize] += &acc[q] * &hn;
            }
        }
        reach += n as usize;
        acc = next;
    }
    acc
}

pub fn line_cohomology(space: &SpaceSpec, a: &Twist, q: usize) -> Result<BigUint> {
    Cohomology::global().line_cohomology(space, a, q)
}

pub fn sum_cohomology(space: &SpaceSpec, s: &LineBundleSum) -> Result<CohomologyTable> {
    Cohomology::global().sum_cohomology(space, s)
}

pub fn euler_characteristic(space: &SpaceSpec, s: &LineBundleSum) -> Result<BigInt> {
    Cohomology::global().euler_characteristic(space, s)
}

/// `chi(P^n, O(d)) = (d+1)(d+2)...(d+n)/n!`, valid for every integer `d`.
pub fn signed_binomial(n: u32, d: i64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=i64::from(n) {
        num *= d + i;
        den *= i;
    }
    num / den
}

/// Euler characteristic through the product of factor polynomials.
pub fn euler_product(space: &SpaceSpec, s: &LineBundleSum) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for (t, mult) in s.parts() {
        space.check_twist(t)?;
        let chi: BigInt = t
            .components()
            .iter()
            .enumerate()
            .map(|(j, &a)| signed_binomial(space.slot_dim(j), a))
            .product();
        total += chi * BigInt::from(*mult);
    }
    Ok(total)
}

/// `wedge^q S` of a split bundle, merged by twist and sorted.
///
/// Summand `t` with multiplicity `m_t` contributes `m` copies to a count
/// vector; each count vector gives the twist `sum m_t * t` with multiplicity
/// `prod C(mult_t, m_t)`.
pub fn exterior_power(s: &LineBundleSum, q: u64) -> Result<LineBundleSum> {
    let rank = s.rank();
    if q > rank {
        return Err(Error::OutOfRange(format!("wedge^{q} of a rank {rank} bundle")));
    }
    let len = s.twist_len();
    let parts = s.merged_parts();
    let mut out: BTreeMap<Twist, u64> = BTreeMap::new();
    let mut counts = vec![0u64; parts.len()];
    fn walk(
        parts: &[(Twist, u64)],
        idx: usize,
        left: u64,
        counts: &mut Vec<u64>,
        len: usize,
        out: &mut BTreeMap<Twist, u64>,
    ) {
        if idx == parts.len() {
            if left == 0 {
                let mut t = Twist::zero(len);
                let mut mult = 1u64;
                for ((tw, m), &c) in parts.iter().zip(counts.iter()) {
                    if c > 0 {
                        t = &t + &tw.scale(c as i64);
                        mult *= binomial(*m, c).try_into().unwrap_or(u64::MAX);
                    }
                }
                *out.entry(t).or_insert(0) += mult;
            }
            return;
        }
        let cap = parts[idx].1.min(left);
        for c in 0..=cap {
            counts[idx] = c;
            walk(parts, idx + 1, left - c, counts, len, out);
        }
        counts[idx] = 0;
    }
    walk(&parts, 0, q, &mut counts, len, &mut out);
    Ok(LineBundleSum::from_parts(len, out.into_iter().collect()))
}
