//! Line-bundle cohomology against a monomial-counting oracle.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

use monadforge_core::cohom::{
    bott, euler_characteristic, euler_product, exterior_power, line_cohomology, sum_cohomology, binomial,
};
use monadforge_core::monad::LineBundleSum;
use monadforge_core::oracle::section_basis;
use monadforge_core::picard::{SpaceSpec, Twist};

/// Monomials of degree `d` in `vars` variables, counted one by one.
fn count_monomials(vars: u32, d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    if vars == 1 {
        return 1;
    }
    (0..=d).map(|e| count_monomials(vars - 1, d - e)).sum()
}

fn factor_oracle(n: u32, d: i64, q: u32) -> u64 {
    if q == 0 {
        count_monomials(n + 1, d)
    } else if q == n {
        count_monomials(n + 1, -d - i64::from(n) - 1)
    } else {
        0
    }
}

/// Sum over every composition of `q` into per-slot degrees.
fn kunneth_oracle(dims: &[u32], a: &[i64], q: u32) -> u64 {
    match dims.split_first() {
        None => u64::from(q == 0),
        Some((&n, rest)) => (0..=q.min(n))
            .map(|qj| factor_oracle(n, a[0], qj) * kunneth_oracle(rest, &a[1..], q - qj))
            .sum(),
    }
}

fn boxed(slots: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn factor_examples() {
    assert_eq!(bott(2, 3, 0), BigUint::from(10u32));
    assert_eq!(bott(3, -2, 1), BigUint::zero());
    assert_eq!(bott(1, -2, 1), BigUint::one());
}

#[test]
fn factor_formula_matches_monomial_count() {
    for n in 1..=5u32 {
        for d in -12..=12i64 {
            for q in 0..=n + 1 {
                assert_eq!(bott(n, d, q), BigUint::from(factor_oracle(n, d, q)), "n={n} d={d} q={q}");
            }
        }
    }
}

#[test]
fn factor_serre_duality() {
    for n in 1..=5u32 {
        for d in -20..=20i64 {
            assert_eq!(bott(n, d, n), bott(n, -d - i64::from(n) - 1, 0));
        }
    }
}

#[test]
fn product_matches_composition_oracle() {
    for dims in [vec![1], vec![2], vec![1, 1], vec![1, 2]] {
        let space = SpaceSpec::new(dims).unwrap();
        let slot_dims = space.slot_dims();
        let r = if space.slots() > 2 { 3 } else { 5 };
        for a in boxed(space.slots(), r) {
            let t = Twist::new(a.clone());
            for q in 0..=space.total_dim() {
                let want = kunneth_oracle(&slot_dims, &a, q);
                let got = line_cohomology(&space, &t, q as usize).unwrap();
                assert_eq!(got, BigUint::from(want), "{space} {t} q={q}");
            }
        }
    }
}

#[test]
fn global_sections_match_oracle_basis() {
    for dims in [vec![1], vec![2], vec![1, 1]] {
        let space = SpaceSpec::new(dims).unwrap();
        for a in boxed(space.slots(), 4) {
            let t = Twist::new(a);
            let basis = section_basis(&space, &t).unwrap();
            assert_eq!(
                line_cohomology(&space, &t, 0).unwrap(),
                BigUint::from(basis.monomials.len()),
                "{space} {t}"
            );
        }
    }
}

#[test]
fn product_serre_duality() {
    for dims in [vec![1], vec![2], vec![1, 2]] {
        let space = SpaceSpec::new(dims).unwrap();
        let d = space.total_dim() as usize;
        for a in boxed(space.slots(), 3) {
            let dual: Vec<i64> = a
                .iter()
                .enumerate()
                .map(|(j, &x)| -x - i64::from(space.slot_dim(j)) - 1)
                .collect();
            let (t, u) = (Twist::new(a), Twist::new(dual));
            for q in 0..=d {
                assert_eq!(
                    line_cohomology(&space, &t, q).unwrap(),
                    line_cohomology(&space, &u, d - q).unwrap()
                );
            }
        }
    }
}

/// Negative total degree does not force `h^q = 0` for `q < D - 1` once a
/// factor can carry top cohomology below that range. Offending twists are
/// listed; only `h^0` vanishes unconditionally.
#[test]
fn negative_total_degree_vanishing_is_not_universal() {
    let cases: [(Vec<u32>, i64); 6] = [
        (vec![1], 4),
        (vec![2], 4),
        (vec![1, 1], 3),
        (vec![3], 4),
        (vec![1, 2], 2),
        (vec![1, 1, 1], 2),
    ];
    let mut offenders = Vec::new();
    for (dims, r) in cases {
        let space = SpaceSpec::new(dims).unwrap();
        let top = space.total_dim() as usize;
        for a in boxed(space.slots(), r) {
            if a.iter().sum::<i64>() >= 0 {
                continue;
            }
            let t = Twist::new(a);
            assert!(line_cohomology(&space, &t, 0).unwrap().is_zero());
            for q in 1..top.saturating_sub(1) {
                let h = line_cohomology(&space, &t, q).unwrap();
                if !h.is_zero() {
                    offenders.push((space.to_string(), t.clone(), q, h));
                }
            }
        }
    }
    let has = |space: &str, a: Vec<i64>, q: usize, h: u32| {
        offenders
            .iter()
            .any(|(s, t, qq, hh)| s == space && *t == Twist::new(a.clone()) && *qq == q && *hh == BigUint::from(h))
    };
    let p1p1 = SpaceSpec::new(vec![1, 1]).unwrap().to_string();
    let p2 = SpaceSpec::new(vec![2]).unwrap().to_string();
    assert!(has(&p1p1, vec![-2, 1, 0, 0], 1, 2));
    assert!(has(&p2, vec![-3, 0], 2, 1));
    println!("{} twists with negative total degree and nonzero h^q, q < D-1", offenders.len());
    for (s, t, q, h) in offenders.iter().take(5) {
        println!("  {s} {t} h^{q} = {h}");
    }
}

#[test]
fn sum_examples() {
    let space = SpaceSpec::new(vec![1]).unwrap();
    let s = LineBundleSum::from_parts(2, vec![(Twist::new(vec![-1, 0]), 2), (Twist::new(vec![0, -1]), 2)]);
    assert!(sum_cohomology(&space, &s).unwrap().all_zero());
    let s = LineBundleSum::single(Twist::new(vec![-2, -2]), 3);
    assert_eq!(sum_cohomology(&space, &s).unwrap().dims, vec![0u32.into(), 0u32.into(), 3u32.into()]);
    assert_eq!(euler_characteristic(&space, &LineBundleSum::single(Twist::new(vec![-2, -2]), 1)).unwrap(), BigInt::one());
    assert_eq!(euler_characteristic(&space, &LineBundleSum::single(Twist::new(vec![1, 1]), 1)).unwrap(), BigInt::from(4));
}

#[test]
fn exterior_examples() {
    let s = LineBundleSum::from_parts(2, vec![(Twist::new(vec![-1, 0]), 2), (Twist::new(vec![0, -1]), 2)]);
    let w = exterior_power(&s, 2).unwrap();
    assert_eq!(
        w.merged_parts(),
        vec![
            (Twist::new(vec![-2, 0]), 1),
            (Twist::new(vec![-1, -1]), 4),
            (Twist::new(vec![0, -2]), 1),
        ]
    );
    assert_eq!(exterior_power(&s, 0).unwrap().merged_parts(), vec![(Twist::zero(2), 1)]);
    assert_eq!(exterior_power(&s, 4).unwrap().merged_parts(), vec![(s.c1(), 1)]);
    assert!(exterior_power(&s, 5).is_err());
}

fn sum_strategy(len: usize) -> impl Strategy<Value = LineBundleSum> {
    proptest::collection::vec((proptest::collection::vec(-3i64..=3, len), 1u64..4), 1..4)
        .prop_map(move |parts| LineBundleSum::from_parts(len, parts.into_iter().map(|(t, m)| (Twist::new(t), m)).collect()))
}

proptest! {
    #[test]
    fn exterior_multiplicities_are_binomial(s in sum_strategy(2), q in 0u64..8) {
        prop_assume!(q <= s.rank());
        let total: u64 = exterior_power(&s, q).unwrap().parts().iter().map(|(_, m)| *m).sum();
        prop_assert_eq!(BigUint::from(total), binomial(s.rank(), q));
    }

    #[test]
    fn euler_characteristic_two_ways(s in sum_strategy(4)) {
        let space = SpaceSpec::new(vec![1, 2]).unwrap();
        prop_assert_eq!(euler_characteristic(&space, &s).unwrap(), euler_product(&space, &s).unwrap());
    }
}
