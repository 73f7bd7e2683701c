use num_traits::Zero;
use serde_json::{json, Value};

use super::certificate::{twist_json, uint_json, Certificate, EvidenceStep, Status};
use super::instance_json;
use crate::cohom::Cohomology;
use crate::error::Result;
use crate::monad::{LineBundleSum, MonadDescriptor};
use crate::picard::Twist;

/// Summands of `sum` with a nonzero `h^q` for some `q` in `degrees`.
fn nonvanishing(md: &MonadDescriptor, sum: &LineBundleSum, degrees: &[usize]) -> Result<Vec<Value>> {
    let engine = Cohomology::global();
    let mut out = Vec::new();
    for (t, mult) in sum.merged_parts() {
        let table = engine.line_table(&md.space, &t)?;
        for &q in degrees {
            let h = table.get(q).cloned().unwrap_or_default();
            if !h.is_zero() {
                out.push(json!({
                    "twist": twist_json(&t),
                    "multiplicity": mult,
                    "q": q,
                    "h": uint_json(&h),
                }));
            }
        }
    }
    Ok(out)
}

fn vanishing_step(
    md: &MonadDescriptor,
    id: &str,
    statement: String,
    rule: &str,
    label: &str,
    sum: &LineBundleSum,
    sigma: &Twist,
    degrees: &[usize],
) -> Result<(EvidenceStep, Vec<Value>)> {
    let bad = nonvanishing(md, sum, degrees)?;
    let mut tagged = Vec::new();
    for w in &bad {
        let mut w = w.clone();
        w["sum"] = json!(label);
        w["sigma"] = twist_json(sigma);
        tagged.push(w);
    }
    let step = EvidenceStep::new(id, statement, rule)
        .input("sigma", twist_json(sigma))
        .input("sum", sum.to_string())
        .input("degrees", degrees.to_vec())
        .value("nonvanishing", Value::Array(tagged.clone()))
        .check(bad.is_empty(), Status::Inconclusive);
    Ok((step, tagged))
}

/// Simplicity of `E` through `h0(E (x) E*) <= h0(E (x) K*) = h0(K (x) K*) = 1`.
///
/// The middle equality needs `h0 = h1 = 0` for `K* (x) O(sigma)` at every
/// source twist `sigma`, which follows from the dual display sequence once
/// `h0, h1` of `middle* (sigma)` and `h1, h2` of `target* (sigma)` vanish.
/// A failed vanishing leaves the claim undecided, never refuted.
pub fn certify_simplicity(md: &MonadDescriptor, stability: &Certificate) -> Result<Certificate> {
    let mut steps = Vec::new();
    let mut failures: Vec<Value> = Vec::new();
    let sigmas = md.source.distinct_twists();

    let mut step1_ok = true;
    let mut step2_ok = true;
    for (i, sigma) in sigmas.iter().enumerate() {
        let suffix = if sigmas.len() > 1 { format!("-{}", i + 1) } else { String::new() };
        let mid = md.middle.dual().twisted(sigma);
        let (step, bad) = vanishing_step(
            md,
            &format!("middle-dual{suffix}"),
            format!("h0 = h1 = 0 for middle* (x) O{sigma}"),
            "Kunneth product of factor cohomology",
            "middle*(sigma)",
            &mid,
            sigma,
            &[0, 1],
        )?;
        step1_ok &= bad.is_empty();
        failures.extend(bad);
        steps.push(step);

        let literal = md.middle.twisted(sigma);
        let (step, _) = vanishing_step(
            md,
            &format!("middle-twisted{suffix}"),
            format!("h0 = h1 = 0 for middle (x) O{sigma}, without dualizing"),
            "Kunneth product of factor cohomology",
            "middle(sigma)",
            &literal,
            sigma,
            &[0, 1],
        )?;
        steps.push(step.informational());

        let tgt = md.target.dual().twisted(sigma);
        let (step, bad) = vanishing_step(
            md,
            &format!("target-dual{suffix}"),
            format!("h1 = h2 = 0 for target* (x) O{sigma}"),
            "Kunneth product of factor cohomology",
            "target*(sigma)",
            &tgt,
            sigma,
            &[1, 2],
        )?;
        step2_ok &= bad.is_empty();
        failures.extend(bad);
        steps.push(step);
    }

    let both = step1_ok && step2_ok;
    steps.push(
        EvidenceStep::new(
            "kernel-dual-vanishing",
            "h0 = h1 = 0 for K* (x) O(sigma) at every source twist sigma",
            "long exact sequence of 0 -> target* -> middle* -> K* -> 0",
        )
        .check(both, Status::Inconclusive),
    );
    steps.push(
        EvidenceStep::new(
            "tensored-sequence",
            "h0(K (x) K*) = h0(E (x) K*)",
            "long exact sequence of 0 -> source (x) K* -> K (x) K* -> E (x) K* -> 0",
        )
        .check(both, Status::Inconclusive),
    );
    steps.push(
        EvidenceStep::new("stable-simple", "h0(K (x) K*) = 1", "a stable bundle is simple")
            .value("stability_status", stability.status.as_str())
            .check(stability.status == Status::Verified, Status::Inconclusive),
    );
    let chain_ok = both && stability.status == Status::Verified;
    steps.push(
        EvidenceStep::new(
            "chain",
            "1 <= h0(E (x) E*) <= h0(E (x) K*) = 1",
            "identity endomorphism; E* injects into K*",
        )
        .check(chain_ok, Status::Inconclusive),
    );

    let witness = failures.into_iter().next();
    Ok(Certificate::new(
        "simplicity-E",
        "the cohomology bundle E of the monad is simple",
        instance_json(md),
        steps,
        witness,
    ))
}
