use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cohom::exterior_power;
use crate::error::{Error, Result};
use crate::monad::LineBundleSum;
use crate::picard::{ceil_rational, floor_rational, DegreeForm, SpaceSpec, Twist};

/// Degree condition on candidate twists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    /// `delta(B) < r`.
    Below(BigRational),
    /// `delta(B) <= r`.
    AtMost(BigRational),
}

impl Bound {
    /// Largest integer value of `delta` allowed.
    pub fn max_delta(&self) -> BigInt {
        match self {
            Bound::Below(r) => ceil_rational(r) - 1,
            Bound::AtMost(r) => floor_rational(r),
        }
    }

    pub fn admits(&self, delta: &BigInt) -> bool {
        *delta <= self.max_delta()
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Below(r) => write!(f, "delta(B) < {r}"),
            Bound::AtMost(r) => write!(f, "delta(B) <= {r}"),
        }
    }
}

/// The finite set of twists that can carry sections of `wedge^q K (B)`
/// within a degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistRegion {
    pub q: u64,
    pub bound: Bound,
    /// Summand twists `T` of `wedge^q middle`.
    pub summands: Vec<Twist>,
    /// `l_j = -max_T T_j`.
    pub lower: Vec<i64>,
    /// Per-slot upper bound implied by the degree bound and `lower`.
    pub upper: Vec<i64>,
    /// Candidates in lex order.
    pub twists: Vec<Twist>,
}

impl TwistRegion {
    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }

    /// Whether `B` meets both defining conditions.
    pub fn member(&self, form: &DegreeForm, b: &Twist) -> bool {
        self.bound.admits(&form.eval(b)) && self.summands.iter().any(|t| (t + b).is_nonnegative())
    }
}

/// Twists `B` with `B + T >= 0` for some summand `T` of `wedge^q middle` and
/// `delta(B)` within `bound`.
pub fn candidate_region(
    space: &SpaceSpec,
    form: &DegreeForm,
    middle: &LineBundleSum,
    q: u64,
    bound: Bound,
) -> Result<TwistRegion> {
    if q == 0 || q > middle.rank() {
        return Err(Error::OutOfRange(format!(
            "q = {q} outside 1..={}",
            middle.rank()
        )));
    }
    let weights = form.weights();
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidPolarization("degree weights must be positive".into()));
    }
    let slots = space.slots();
    let summands: Vec<Twist> = exterior_power(middle, q)?
        .merged_parts()
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    let lower: Vec<i64> = (0..slots)
        .map(|j| -summands.iter().map(|t| t[j]).max().unwrap_or(0))
        .collect();
    let max_delta = bound.max_delta();
    let floor_sum: BigInt = weights.iter().zip(&lower).map(|(w, &l)| w * l).sum();
    let slack = &max_delta - &floor_sum;
    let upper: Vec<i64> = (0..slots)
        .map(|j| {
            if slack.is_negative() {
                lower[j] - 1
            } else {
                let extra = (&slack / &weights[j]).to_i64().unwrap_or(i64::MAX / 4);
                lower[j] + extra
            }
        })
        .collect();

    let mut twists = Vec::new();
    if !slack.is_negative() {
        // suffix_min[j] = minimal delta contribution of slots j..
        let mut suffix_min = vec![BigInt::zero(); slots + 1];
        for j in (0..slots).rev() {
            suffix_min[j] = &suffix_min[j + 1] + &weights[j] * lower[j];
        }
        let mut cur = Vec::with_capacity(slots);
        enumerate(
            0,
            &BigInt::zero(),
            &mut cur,
            &lower,
            &upper,
            weights,
            &suffix_min,
            &max_delta,
            &summands,
            &mut twists,
        );
    }
    Ok(TwistRegion {
        q,
        bound,
        summands,
        lower,
        upper,
        twists,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    j: usize,
    partial: &BigInt,
    cur: &mut Vec<i64>,
    lower: &[i64],
    upper: &[i64],
    weights: &[BigInt],
    suffix_min: &[BigInt],
    max_delta: &BigInt,
    summands: &[Twist],
    out: &mut Vec<Twist>,
) {
    if j == lower.len() {
        let b = Twist::new(cur.clone());
        if summands.iter().any(|t| (t + &b).is_nonnegative()) {
            out.push(b);
        }
        return;
    }
    for v in lower[j]..=upper[j] {
        let next = partial + &weights[j] * v;
        if &next + &suffix_min[j + 1] > *max_delta {
            break;
        }
        cur.push(v);
        enumerate(j + 1, &next, cur, lower, upper, weights, suffix_min, max_delta, summands, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::Polarization;
    use num_bigint::BigInt;

    fn setup() -> (SpaceSpec, DegreeForm, LineBundleSum) {
        let space = SpaceSpec::new(vec![1]).unwrap();
        let form = DegreeForm::new(&space, &Polarization::new(vec![1]).unwrap()).unwrap();
        let middle = LineBundleSum::from_parts(
            2,
            vec![(Twist::new(vec![0, -1]), 2), (Twist::new(vec![-1, 0]), 2)],
        );
        (space, form, middle)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn smallest_instance_region() {
        let (space, form, middle) = setup();
        let r = candidate_region(&space, &form, &middle, 1, Bound::Below(rat(4, 3))).unwrap();
        let shown: Vec<String> = r.twists.iter().map(Twist::to_string).collect();
        assert_eq!(shown, vec!["(0,1)", "(1,0)"]);
        assert_eq!(r.lower, vec![0, 0]);
        assert_eq!(r.upper, vec![1, 1]);
    }

    #[test]
    fn nonpositive_bound_is_empty() {
        let (space, form, middle) = setup();
        for q in 1..=4 {
            let r = candidate_region(&space, &form, &middle, q, Bound::AtMost(rat(0, 1))).unwrap();
            assert!(r.is_empty(), "q = {q}: {:?}", r.twists);
        }
    }

    #[test]
    fn q_zero_rejected() {
        let (space, form, middle) = setup();
        assert!(candidate_region(&space, &form, &middle, 0, Bound::Below(rat(1, 1))).is_err());
        assert!(candidate_region(&space, &form, &middle, 5, Bound::Below(rat(1, 1))).is_err());
    }

    #[test]
    fn strict_and_weak_bounds() {
        assert_eq!(Bound::Below(rat(4, 3)).max_delta(), BigInt::from(1));
        assert_eq!(Bound::Below(rat(2, 1)).max_delta(), BigInt::from(1));
        assert_eq!(Bound::AtMost(rat(2, 1)).max_delta(), BigInt::from(2));
        assert_eq!(Bound::AtMost(rat(-1, 2)).max_delta(), BigInt::from(-1));
    }
}
