use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::certificate::{int_json, rat_json, twist_json, uint_json, Certificate, EvidenceStep, Status};
use super::region::{candidate_region, Bound, TwistRegion};
use super::{instance_json, CertifyOptions};
use crate::cohom::{binomial, exterior_power, Cohomology};
use crate::error::Result;
use crate::exec;
use crate::monad::{homogeneity_check, kernel_invariants_with, LineBundleSum, MonadDescriptor};
use crate::oracle::{h0_wedge_kernel, Elimination, OracleOutcome};
use crate::picard::{invariants_with, normalize_with, DegreeForm, Twist};

/// How the vanishing of `h^0(wedge^q K (B))` was decided, if it was.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probe {
    /// The ambient `h^0(wedge^q middle (B))` is zero.
    Ambient,
    Oracle {
        kernel: usize,
        domain: usize,
        exact: bool,
    },
    /// Ambient sections exist and the oracle could not run.
    Undecided { ambient: BigUint, reason: String },
}

impl Probe {
    fn to_json(&self, b: &Twist) -> Value {
        match self {
            Probe::Ambient => json!({ "B": twist_json(b), "path": "ambient", "h0": 0 }),
            Probe::Oracle { kernel, domain, exact } => json!({
                "B": twist_json(b),
                "path": "elimination",
                "h0": kernel,
                "domain": domain,
                "exact": exact,
            }),
            Probe::Undecided { ambient, reason } => json!({
                "B": twist_json(b),
                "path": "undecided",
                "ambient_h0": uint_json(ambient),
                "reason": reason,
            }),
        }
    }
}

type ProbeCache = BTreeMap<(u64, Twist), Probe>;

fn probe(
    md: &MonadDescriptor,
    wedge: &LineBundleSum,
    q: u64,
    b: &Twist,
    homogeneous: bool,
    opts: &CertifyOptions,
) -> Result<Probe> {
    let ambient = Cohomology::global().h0_sum(&md.space, &wedge.twisted(b))?;
    if ambient.is_zero() {
        return Ok(Probe::Ambient);
    }
    if !homogeneous {
        return Ok(Probe::Undecided {
            ambient,
            reason: "matrix entries are not sections of the displayed sums".into(),
        });
    }
    Ok(match h0_wedge_kernel(md, q as usize, b, &opts.oracle)? {
        OracleOutcome::Computed(k) => Probe::Oracle {
            kernel: k.kernel,
            domain: k.domain,
            exact: k.method == Elimination::Rational || k.kernel == 0,
        },
        OracleOutcome::TooLarge { domain, budget } => Probe::Undecided {
            ambient,
            reason: format!("domain {domain} exceeds budget {budget}"),
        },
    })
}

/// Probes every twist of the region, reusing earlier results.
fn scan(
    md: &MonadDescriptor,
    region: &TwistRegion,
    homogeneous: bool,
    opts: &CertifyOptions,
    cache: &mut ProbeCache,
) -> Result<Vec<(Twist, Probe)>> {
    let q = region.q;
    let todo: Vec<Twist> = region
        .twists
        .iter()
        .filter(|b| !cache.contains_key(&(q, (*b).clone())))
        .cloned()
        .collect();
    let wedge = exterior_power(&md.middle, q)?;
    let fresh = exec::map(&todo, |b| probe(md, &wedge, q, b, homogeneous, opts));
    for (b, p) in todo.into_iter().zip(fresh) {
        cache.insert((q, b), p?);
    }
    Ok(region
        .twists
        .iter()
        .map(|b| (b.clone(), cache[&(q, b.clone())].clone()))
        .collect())
}

/// Longest twist list written into a step; counts are always complete.
const LISTED: usize = 16;

struct ScanSummary {
    ambient: usize,
    oracle_zero: usize,
    nonzero: Vec<Value>,
    nonzero_count: usize,
    undecided: Vec<Value>,
    undecided_count: usize,
    /// First nonzero found by exact elimination.
    exact_nonzero: Option<(Twist, usize)>,
}

fn summarize(results: &[(Twist, Probe)]) -> ScanSummary {
    let mut s = ScanSummary {
        ambient: 0,
        oracle_zero: 0,
        nonzero: Vec::new(),
        nonzero_count: 0,
        undecided: Vec::new(),
        undecided_count: 0,
        exact_nonzero: None,
    };
    for (b, p) in results {
        match p {
            Probe::Ambient => s.ambient += 1,
            Probe::Oracle { kernel: 0, .. } => s.oracle_zero += 1,
            Probe::Oracle { kernel, exact, .. } => {
                s.nonzero_count += 1;
                if s.nonzero.len() < LISTED {
                    s.nonzero.push(p.to_json(b));
                }
                if *exact && s.exact_nonzero.is_none() {
                    s.exact_nonzero = Some((b.clone(), *kernel));
                }
            }
            Probe::Undecided { .. } => {
                s.undecided_count += 1;
                if s.undecided.len() < LISTED {
                    s.undecided.push(p.to_json(b));
                }
            }
        }
    }
    s
}

fn scan_step(step: EvidenceStep, region: &TwistRegion, s: &ScanSummary) -> EvidenceStep {
    step.value("region_size", region.len())
        .value("lower", region.lower.clone())
        .value("upper", region.upper.clone())
        .value("ambient_vanishing", s.ambient)
        .value("elimination_vanishing", s.oracle_zero)
        .value("nonvanishing_count", s.nonzero_count)
        .value("nonvanishing", Value::Array(s.nonzero.clone()))
        .value("undecided_count", s.undecided_count)
        .value("undecided", Value::Array(s.undecided.clone()))
}

/// Stability of `K = ker(b_mat)` via the vanishing of
/// `h^0(wedge^q K (B))` for `delta(B) < -q*slope(K)`, `1 <= q < rank K`.
///
/// A nonzero `h^0(K(B))` in that range is a destabilizing subsheaf and
/// falsifies the claim. Nonvanishing at `q >= 2` only leaves the claim
/// undecided.
pub fn certify_stability(md: &MonadDescriptor, monad: &Certificate, opts: &CertifyOptions) -> Result<Certificate> {
    let form = DegreeForm::new(&md.space, &md.pol)?;
    let mut steps = Vec::new();
    let mut witness = None;

    steps.push(
        EvidenceStep::new(
            "monad-hypotheses",
            "b_mat * a_mat = 0 and both maps have maximal rank at every point",
            "monad certificate",
        )
        .value("monad_status", monad.status.as_str())
        .check(monad.status == Status::Verified, Status::Inconclusive),
    );

    let homog = homogeneity_check(md)?;
    let homogeneous = homog.passed();
    steps.push(
        EvidenceStep::new(
            "homogeneity",
            "every matrix entry is a section of Hom between the corresponding summands",
            "entry multidegree = row twist - column twist",
        )
        .value("entries_checked", homog.checked)
        .value("mismatches", homog.mismatches.len())
        .check(homogeneous, Status::Inconclusive),
    );

    let inv = kernel_invariants_with(md, &form)?.kernel;
    let nu = inv.slope.clone();
    steps.push(
        EvidenceStep::new("degree", "deg K < 0", "deg = c1(K) . L^(D-1)")
            .input("rank", inv.rank)
            .input("c1", twist_json(&inv.c1))
            .value("degree", int_json(&inv.degree))
            .value("slope", rat_json(&nu))
            .check(inv.degree.is_negative(), Status::Inconclusive),
    );

    let mut cache = ProbeCache::new();
    let top_q = inv.rank.saturating_sub(1);
    let d = form.d().clone();
    for q in 1..=top_q {
        let id = format!("hoppe-q{q}");
        let stmt = format!("h0(wedge^{q} K (B)) = 0 whenever delta(B) < {q} * (-slope K)");
        let bound = Bound::Below(-&nu * BigRational::from_integer(BigInt::from(q)));
        let step = EvidenceStep::new(&id, stmt, "generalized Hoppe criterion, strict bound")
            .input("q", q)
            .input("bound", bound.to_string());
        if opts.max_q.is_some_and(|m| q > m) {
            steps.push(step.value("skipped", "q exceeds max_q").status(Status::Inconclusive));
            continue;
        }
        let region = candidate_region(&md.space, &form, &md.middle, q, bound)?;
        let results = scan(md, &region, homogeneous, opts, &mut cache)?;
        let summary = summarize(&results);
        let status = if let (1, Some((b, h))) = (q, &summary.exact_nonzero) {
            if witness.is_none() {
                witness = Some(json!({ "q": q, "B": twist_json(b), "h0": h }));
            }
            Status::Falsified
        } else if summary.nonzero.is_empty() && summary.undecided.is_empty() {
            Status::Verified
        } else {
            if witness.is_none() {
                let first = summary.nonzero.first().or(summary.undecided.first()).cloned();
                witness = first.map(|mut w| {
                    w["q"] = json!(q);
                    w
                });
            }
            Status::Inconclusive
        };
        steps.push(scan_step(step, &region, &summary).status(status));
    }

    // Normalized variant and the unnormalized argument, reported alongside.
    for q in 1..=top_q {
        if opts.max_q.is_some_and(|m| q > m) {
            break;
        }
        let rank_q = binomial(inv.rank, q);
        let rank_q = u64::try_from(rank_q).unwrap_or(u64::MAX);
        let c1_q = inv.c1.scale(binomial(inv.rank - 1, q - 1).try_into().unwrap_or(i64::MAX));
        let inv_q = invariants_with(&form, &md.space, rank_q, &c1_q)?;
        let norm = normalize_with(&form, &inv_q)?;
        steps.push(
            EvidenceStep::new(
                format!("normalized-q{q}"),
                format!("(wedge^{q} K) is already normalized"),
                "normalization k = ceil(slope / d)",
            )
            .informational()
            .input("q", q)
            .value("rank", rank_q)
            .value("degree", int_json(&inv_q.degree))
            .value("k", int_json(&norm.k))
            .value("normalized_degree", int_json(&norm.normalized_degree))
            .check(norm.k.is_zero(), Status::Falsified),
        );

        // B = B' - k e_1 with delta(B') <= 0.
        let bound = Bound::AtMost(BigRational::from_integer(-&norm.k * &d));
        let region = candidate_region(&md.space, &form, &md.middle, q, bound.clone())?;
        let results = scan(md, &region, homogeneous, opts, &mut cache)?;
        let summary = summarize(&results);
        let ok = summary.nonzero.is_empty() && summary.undecided.is_empty();
        let step = EvidenceStep::new(
            format!("normalized-vanishing-q{q}"),
            format!("h0((wedge^{q} K)_norm (B')) = 0 whenever delta(B') <= 0"),
            "Hoppe criterion after normalization",
        )
        .informational()
        .input("q", q)
        .input("bound", bound.to_string());
        steps.push(scan_step(step, &region, &summary).check(ok, Status::Inconclusive));

        let zero = Bound::AtMost(BigRational::zero());
        let region = candidate_region(&md.space, &form, &md.middle, q, zero.clone())?;
        let wedge = exterior_power(&md.middle, q)?;
        let mut nonzero = Vec::new();
        let mut nonzero_count = 0usize;
        for b in &region.twists {
            let h = Cohomology::global().h0_sum(&md.space, &wedge.twisted(b))?;
            if !h.is_zero() {
                nonzero_count += 1;
                if nonzero.len() < LISTED {
                    nonzero.push(json!({ "B": twist_json(b), "ambient_h0": uint_json(&h) }));
                }
            }
        }
        steps.push(
            EvidenceStep::new(
                format!("ambient-q{q}"),
                format!("h0(wedge^{q} middle (B)) = 0 whenever delta(B) <= 0"),
                "section injection into the middle sum, unnormalized bound",
            )
            .informational()
            .input("q", q)
            .input("bound", zero.to_string())
            .value("region_size", region.len())
            .value("ambient_nonvanishing_count", nonzero_count)
            .value("ambient_nonvanishing", Value::Array(nonzero))
            .check(nonzero_count == 0, Status::Inconclusive),
        );
    }

    if inv.rank < 2 {
        steps.push(
            EvidenceStep::new("rank-one", "line bundles are stable", "rank 1")
                .value("rank", inv.rank),
        );
    }

    Ok(Certificate::new(
        "stability-K",
        "the kernel bundle K = ker(b_mat) is slope-stable",
        instance_json(md),
        steps,
        witness,
    ))
}
