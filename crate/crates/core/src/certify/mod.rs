//! Certificates for the monad hypotheses, for stability of the kernel bundle
//! and for simplicity of the cohomology bundle.
//!
//! Every certificate carries its evidence. Required steps decide the status;
//! informational steps record related computations that the status does not
//! depend on.

mod certificate;
mod region;
mod simplicity;
mod stability;

pub use certificate::{
    aggregate, int_json, rat_json, twist_json, uint_json, Certificate, EvidenceStep, Status,
};
pub use region::{candidate_region, Bound, TwistRegion};
pub use simplicity::certify_simplicity;
pub use stability::{certify_stability, Probe};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::monad::{
    compose_check, floystad_check, homogeneity_check, kernel_invariants_with, rank_certificate, Feasibility,
    LineBundleSum, MonadDescriptor, Profile,
};
use crate::oracle::OracleOptions;
use crate::picard::{top_coefficient, ChowClass, DegreeForm};
use crate::polyalg::{evaluate, numeric_rank, Field};

/// Knobs shared by the certifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub oracle: OracleOptions,
    /// Largest exterior power examined; `None` means all of them.
    pub max_q: Option<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            oracle: OracleOptions::default(),
            max_q: None,
            trials: 100,
            seed: 0,
        }
    }
}

fn sum_json(s: &LineBundleSum) -> Value {
    Value::Array(
        s.parts()
            .iter()
            .map(|(t, m)| json!({ "twist": twist_json(t), "multiplicity": m }))
            .collect(),
    )
}

/// Echo of the instance embedded in each certificate.
pub fn instance_json(md: &MonadDescriptor) -> Value {
    json!({
        "s": md.space.s(),
        "n": md.space.dims(),
        "alpha": md.pol.alphas(),
        "k": md.k,
        "profile": md.profile.to_string(),
        "overridden": md.overridden,
        "source": sum_json(&md.source),
        "middle": sum_json(&md.middle),
        "target": sum_json(&md.target),
    })
}

/// Matrix-level hypotheses plus rank and `c1` bookkeeping.
pub fn certify_monad(md: &MonadDescriptor, opts: &CertifyOptions, prime: u64) -> Result<Certificate> {
    md.check_shapes()?;
    let form = DegreeForm::new(&md.space, &md.pol)?;
    let mut steps = Vec::new();
    let mut witness = None;

    let comp = compose_check(md)?;
    let mut step = EvidenceStep::new("compose", "b_mat * a_mat = 0", "symbolic product")
        .value("a_mat", format!("{}x{}", md.a_mat.rows(), md.a_mat.cols()))
        .value("b_mat", format!("{}x{}", md.b_mat.rows(), md.b_mat.cols()));
    if let Some((r, c, p)) = &comp.residual {
        step = step.value("residual", json!({ "row": r, "col": c, "entry": p.to_string() }));
        witness = Some(json!({ "step": "compose", "row": r, "col": c, "entry": p.to_string() }));
    }
    steps.push(step.check(comp.passed, Status::Falsified));

    let rank = rank_certificate(md, opts.trials, prime, opts.seed)?;
    let structural: Vec<Value> = rank
        .structural
        .iter()
        .map(|s| {
            json!({
                "matrix": s.matrix.to_string(),
                "group": s.group,
                "family": format!("{:?}", s.family).to_lowercase(),
                "leads": s.leads_verified,
                "violation": s.violation,
            })
        })
        .collect();
    let failed = rank.first_failed_trial().cloned();
    let mut rank_status = if rank.passed() {
        Status::Verified
    } else {
        Status::Inconclusive
    };
    let mut step = EvidenceStep::new(
        "maximal-rank",
        "a_mat and b_mat have maximal rank at every point of X",
        "triangular band minors at each leading coordinate; random points over F_p",
    )
    .input("prime", prime)
    .input("seed", opts.seed)
    .input("trials", opts.trials)
    .value("expected_rank_a", rank.expected_a)
    .value("expected_rank_b", rank.expected_b)
    .value("structural", Value::Array(structural))
    .value("trials_passed", rank.trials.iter().filter(|t| t.ok).count());
    if let Some(t) = &failed {
        // A deficient rank mod p only refutes once it is confirmed over Q.
        let confirmed = t.error.is_none() && rational_rank_deficient(md, &t.point)?;
        if confirmed {
            rank_status = Status::Falsified;
        }
        let w = json!({
            "step": "maximal-rank",
            "trial": t.trial,
            "point": t.point,
            "rank_a": t.a_rank,
            "rank_b": t.b_rank,
            "confirmed_over_q": confirmed,
            "error": t.error,
        });
        step = step.value("first_failure", w.clone());
        witness.get_or_insert(w);
    }
    steps.push(step.status(rank_status));

    let homog = homogeneity_check(md)?;
    let sample: Vec<Value> = homog
        .mismatches
        .iter()
        .take(8)
        .map(|m| {
            json!({
                "matrix": m.matrix.to_string(),
                "row": m.row,
                "col": m.col,
                "found": m.found.as_ref().map(twist_json),
                "required": twist_json(&m.required),
            })
        })
        .collect();
    steps.push(
        EvidenceStep::new(
            "homogeneity",
            "entry multidegrees equal row twist minus column twist",
            "multidegree of each entry",
        )
        .informational()
        .value("entries_checked", homog.checked)
        .value("mismatch_count", homog.mismatches.len())
        .value("mismatches", Value::Array(sample))
        .check(homog.passed(), Status::Inconclusive),
    );

    if md.k > 0 {
        let inv = kernel_invariants_with(md, &form)?;
        let sum_n: u64 = md.space.dims().iter().map(|&n| u64::from(n)).sum();
        let (s, k) = (md.space.s() as u64, u64::from(md.k));
        let want_k = 2 * sum_n + (2 * s - 1) * k;
        let want_e = 2 * sum_n + 2 * k * (s - 1);
        steps.push(
            EvidenceStep::new(
                "ranks",
                "rank K = 2*sum(n) + (2s-1)k and rank E = 2*sum(n) + 2k(s-1)",
                "rank bookkeeping of the monad",
            )
            .value("rank_K", inv.kernel.rank)
            .value("rank_E", inv.cohomology.rank)
            .value("expected_rank_K", want_k)
            .value("expected_rank_E", want_e)
            .check(inv.kernel.rank == want_k && inv.cohomology.rank == want_e, Status::Falsified),
        );

        let mut expect_c1 = Vec::new();
        for (&n, &a) in md.space.dims().iter().zip(md.pol.alphas()) {
            let v = -(i64::from(n) + 2 * i64::from(md.k)) * i64::from(a);
            expect_c1.extend([v, v]);
        }
        let c1_ok = inv.kernel.c1.components() == expect_c1.as_slice();
        let mut step = EvidenceStep::new(
            "c1-kernel",
            "c1(K) has slots -(n_i + 2k) alpha_i",
            "c1(middle) - c1(target)",
        )
        .value("c1_K", twist_json(&inv.kernel.c1))
        .value("expected", expect_c1)
        .check(c1_ok, Status::Falsified);
        if md.profile != Profile::Paper || md.overridden {
            step = step.informational();
        }
        steps.push(step);

        let mut step = EvidenceStep::new("degree-kernel", "deg K < 0", "c1(K) . L^(D-1)")
            .value("degree", int_json(&inv.kernel.degree))
            .value("slope", rat_json(&inv.kernel.slope))
            .check(inv.kernel.degree < BigInt::from(0), Status::Inconclusive)
            .informational();
        if md.pol.alphas().iter().all(|&a| a == 1) {
            let l = ChowClass::divisor(&md.space, &md.pol.expansion());
            let top = top_coefficient(&md.space, &l.pow(md.space.total_dim()));
            let formula = -BigInt::from(sum_n + 2 * s * k) * &top;
            step = step
                .value("top_L", int_json(&top))
                .value("closed_form", int_json(&formula))
                .value("closed_form_matches", formula == inv.kernel.degree);
        }
        steps.push(step);

        let d = md.space.total_dim();
        let feas = floystad_check(k, md.middle.rank(), k, u64::from(d))?;
        steps.push(
            EvidenceStep::new(
                "floystad",
                "the rank triple satisfies an existence condition for linear monads on P^N",
                "advisory, with N = dim X",
            )
            .informational()
            .input("a", k)
            .input("b", md.middle.rank())
            .input("c", k)
            .input("N", d)
            .value(
                "condition",
                match feas {
                    Feasibility::Feasible(c) => json!(c),
                    Feasibility::Infeasible => Value::Null,
                },
            )
            .check(feas != Feasibility::Infeasible, Status::Inconclusive),
        );
    }

    Ok(Certificate::new(
        "monad",
        "a_mat and b_mat define a monad with the stated ranks",
        instance_json(md),
        steps,
        witness,
    ))
}

fn rational_rank_deficient(md: &MonadDescriptor, point: &[u64]) -> Result<bool> {
    let assignment = md
        .coordinates()
        .into_iter()
        .zip(point)
        .map(|(v, &x)| (v, BigRational::from_integer(BigInt::from(x))))
        .collect();
    let a = numeric_rank(&evaluate(&md.a_mat, &assignment, Field::Rational)?);
    let b = numeric_rank(&evaluate(&md.b_mat, &assignment, Field::Rational)?);
    Ok(a < md.a_mat.rows().min(md.a_mat.cols()) || b < md.b_mat.rows().min(md.b_mat.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monad::build_monad;
    use crate::picard::{Polarization, SpaceSpec, Twist};

    fn md(n: &[u32], a: &[u32], k: u32, p: Profile) -> MonadDescriptor {
        build_monad(
            &SpaceSpec::new(n.to_vec()).unwrap(),
            &Polarization::new(a.to_vec()).unwrap(),
            k,
            p,
        )
        .unwrap()
    }

    #[test]
    fn monad_certificate_smallest() {
        let m = md(&[1], &[1], 1, Profile::Paper);
        let c = certify_monad(&m, &CertifyOptions::default(), crate::DEFAULT_PRIME).unwrap();
        assert_eq!(c.status, Status::Verified, "{c:#?}");
        assert_eq!(c.step("degree-kernel").unwrap().values["closed_form_matches"], json!(true));
        let m = md(&[1], &[1], 1, Profile::Homogeneous);
        let c = certify_monad(&m, &CertifyOptions::default(), crate::DEFAULT_PRIME).unwrap();
        assert_eq!(c.status, Status::Verified);
        assert!(!c.step("c1-kernel").unwrap().required);
    }

    #[test]
    fn paper_profile_matrix_claims_hold() {
        let m = md(&[1, 1], &[1, 1], 1, Profile::Paper);
        let c = certify_monad(&m, &CertifyOptions::default(), crate::DEFAULT_PRIME).unwrap();
        assert_eq!(c.status, Status::Verified);
        assert_eq!(c.step("homogeneity").unwrap().status, Status::Inconclusive);
    }

    #[test]
    fn stability_smallest_homogeneous() {
        let m = md(&[1], &[1], 1, Profile::Homogeneous);
        let opts = CertifyOptions::default();
        let mc = certify_monad(&m, &opts, crate::DEFAULT_PRIME).unwrap();
        let sc = certify_stability(&m, &mc, &opts).unwrap();
        assert_eq!(sc.step("degree").unwrap().values["slope"], json!("-4/3"));
        assert_eq!(sc.status, Status::Verified, "{sc:#?}");
        let simp = certify_simplicity(&m, &sc).unwrap();
        assert_eq!(simp.status, Status::Verified);
    }

    #[test]
    fn trivial_summand_is_destabilizing() {
        let mut m = md(&[1], &[1], 1, Profile::Homogeneous);
        let rows = m.a_mat.rows();
        let mut a = crate::polyalg::PolyMatrix::zeros(rows + 1, 1);
        for (r, c, p) in m.a_mat.entries() {
            a.set(r, c, p.clone());
        }
        let mut b = crate::polyalg::PolyMatrix::zeros(1, rows + 1);
        for (r, c, p) in m.b_mat.entries() {
            b.set(r, c, p.clone());
        }
        let mut parts = m.middle.parts().to_vec();
        parts.push((Twist::zero(2), 1));
        let middle = LineBundleSum::from_parts(2, parts);
        m.a_mat = a;
        m.b_mat = b;
        m = m.with_sums(None, Some(middle), None).unwrap();
        let opts = CertifyOptions::default();
        let mc = certify_monad(&m, &opts, crate::DEFAULT_PRIME).unwrap();
        let sc = certify_stability(&m, &mc, &opts).unwrap();
        assert_eq!(sc.status, Status::Falsified, "{sc:#?}");
        let w = sc.witness.unwrap();
        assert_eq!(w["q"], json!(1));
        assert_eq!(w["B"], json!([0, 0]));
    }

    #[test]
    fn simplicity_fixtures() {
        let opts = CertifyOptions::default();
        for (n, ok) in [(2u32, true), (1u32, false)] {
            let m = md(&[n], &[1], 1, Profile::Paper);
            let mc = certify_monad(&m, &opts, crate::DEFAULT_PRIME).unwrap();
            let sc = certify_stability(&m, &mc, &opts).unwrap();
            let c = certify_simplicity(&m, &sc).unwrap();
            assert_eq!(c.step("middle-dual").unwrap().status, Status::Verified);
            assert_eq!(c.step("target-dual").unwrap().status == Status::Verified, ok);
            assert_eq!(c.status, Status::Inconclusive);
            if !ok {
                let w = c.witness.unwrap();
                assert_eq!(w["twist"], json!([-2, -2]));
                assert_eq!(w["q"], json!(2));
                assert_eq!(w["h"], json!(1));
            }
        }
    }
}
