//! Intersection numbers and degrees against an untruncated expansion.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use monadforge_core::picard::{
    degree_and_slope, delta, normalize, top_coefficient, ChowClass, DegreeForm, Polarization, SpaceSpec, Twist,
};

type Expansion = HashMap<Vec<u32>, BigInt>;

/// `(sum_j c_j h_j)^e` with no relations imposed.
fn expand(coeffs: &[i64], e: u32) -> Expansion {
    let mut acc: Expansion = HashMap::from([(vec![0; coeffs.len()], BigInt::from(1))]);
    for _ in 0..e {
        let mut next = Expansion::new();
        for (m, c) in &acc {
            for (j, &cj) in coeffs.iter().enumerate() {
                if cj == 0 {
                    continue;
                }
                let mut m2 = m.clone();
                m2[j] += 1;
                *next.entry(m2).or_insert_with(BigInt::zero) += c * cj;
            }
        }
        acc = next;
    }
    acc
}

fn spaces() -> Vec<SpaceSpec> {
    [vec![1], vec![2], vec![3], vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]
        .into_iter()
        .map(|d| SpaceSpec::new(d).unwrap())
        .collect()
}

#[test]
fn top_power_matches_untruncated_expansion() {
    for space in spaces() {
        let d = space.total_dim();
        if d > 8 {
            continue;
        }
        for alpha in 1..=3u32 {
            let pol = Polarization::uniform(space.s(), alpha).unwrap();
            let lbar = pol.expansion();
            let l = ChowClass::divisor(&space, &lbar);
            let ours = top_coefficient(&space, &l.pow(d));
            let brute = expand(lbar.components(), d)
                .get(&space.slot_dims())
                .cloned()
                .unwrap_or_default();
            assert_eq!(ours, brute, "{space} alpha={alpha}");
        }
    }
}

#[test]
fn weights_match_untruncated_expansion() {
    for space in spaces() {
        let pol = Polarization::new(vec![2; space.s()]).unwrap();
        let form = DegreeForm::new(&space, &pol).unwrap();
        let lbar = pol.expansion();
        let lpow = expand(lbar.components(), space.total_dim() - 1);
        for j in 0..space.slots() {
            let mut target = space.slot_dims();
            target[j] -= 1;
            let want = lpow.get(&target).cloned().unwrap_or_default();
            assert_eq!(form.weights()[j], want, "{space} slot {j}");
            assert!(want > BigInt::zero());
        }
    }
}

#[test]
fn mixed_dimension_values() {
    let space = SpaceSpec::new(vec![1, 2]).unwrap();
    let pol = Polarization::new(vec![1, 1]).unwrap();
    let l = ChowClass::divisor(&space, &pol.expansion());
    assert_eq!(top_coefficient(&space, &l.pow(6)), BigInt::from(180));
    assert_eq!(
        delta(&space, &pol, &Twist::unit(4, 0)).unwrap(),
        BigInt::from(30)
    );
}

fn twist_strategy(len: usize) -> impl Strategy<Value = Twist> {
    proptest::collection::vec(-6i64..=6, len).prop_map(Twist::new)
}

proptest! {
    #[test]
    fn delta_is_linear(a in twist_strategy(4), b in twist_strategy(4), c in -3i64..=3) {
        let space = SpaceSpec::new(vec![1, 2]).unwrap();
        let pol = Polarization::new(vec![1, 2]).unwrap();
        let lhs = delta(&space, &pol, &(&a + &b.scale(c))).unwrap();
        let rhs = delta(&space, &pol, &a).unwrap() + BigInt::from(c) * delta(&space, &pol, &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_is_additive_over_summands(parts in proptest::collection::vec(twist_strategy(2), 1..6)) {
        let space = SpaceSpec::new(vec![2]).unwrap();
        let pol = Polarization::new(vec![3]).unwrap();
        let c1 = parts.iter().fold(Twist::zero(2), |acc, t| &acc + t);
        let inv = degree_and_slope(&space, &pol, parts.len() as u64, &c1).unwrap();
        let sum: BigInt = parts.iter().map(|t| delta(&space, &pol, t).unwrap()).sum();
        prop_assert_eq!(&inv.degree, &sum);
        prop_assert_eq!(inv.slope, BigRational::new(sum, BigInt::from(parts.len())));
    }

    #[test]
    fn normalization_window(rank in 1u64..12, c1 in twist_strategy(4), alpha in 1u32..=3) {
        let space = SpaceSpec::new(vec![1, 1]).unwrap();
        let pol = Polarization::new(vec![alpha, 1]).unwrap();
        let inv = degree_and_slope(&space, &pol, rank, &c1).unwrap();
        let norm = normalize(&space, &pol, &inv).unwrap();
        let d = DegreeForm::new(&space, &pol).unwrap().d().clone();
        let r = BigInt::from(rank);
        prop_assert!(norm.normalized_degree <= BigInt::zero());
        prop_assert!(norm.normalized_degree >= BigInt::from(1) - &d * &r);
        prop_assert_eq!(norm.normalized_degree, &inv.degree - &norm.k * &d * &r);
    }

    #[test]
    fn reduction_is_idempotent(a in twist_strategy(2), e in 0u32..6) {
        let space = SpaceSpec::new(vec![2]).unwrap();
        let cls = ChowClass::divisor(&space, &a).pow(e);
        prop_assert!(cls.is_reduced());
        let again = cls.mul(&ChowClass::one(&space));
        prop_assert_eq!(again, cls);
    }
}
