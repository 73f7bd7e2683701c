//! Banded matrices, monad descriptors and their validators.
//!
//! A descriptor records the three split bundles `source -> middle -> target`
//! and the two maps between them: `a_mat` (middle x source, the injection)
//! and `b_mat` (target x middle, the surjection). The monad condition
//! `b_mat * a_mat = 0` is always checked, never assumed.
//!
//! Row layout of `middle`, per group `i` in order: `n_i + k` rows carrying
//! the `x^{(i)}` band, then `n_i + k` rows carrying the `y^{(i)}` band.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::picard::{self, BundleInvariants, DegreeForm, Polarization, SpaceSpec, Twist};
use crate::polyalg::{
    evaluate, numeric_rank, Assignment, Family, Field, Homogeneity, Monomial, Poly, PolyMatrix, Var,
};

/// A direct sum of line bundles, kept in matrix-row order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineBundleSum {
    twist_len: usize,
    parts: Vec<(Twist, u64)>,
}

impl LineBundleSum {
    /// Parts with zero multiplicity are dropped.
    pub fn from_parts(twist_len: usize, parts: Vec<(Twist, u64)>) -> Self {
        for (t, _) in &parts {
            assert_eq!(t.len(), twist_len, "twist length mismatch in sum");
        }
        Self {
            twist_len,
            parts: parts.into_iter().filter(|(_, m)| *m > 0).collect(),
        }
    }

    pub fn empty(twist_len: usize) -> Self {
        Self {
            twist_len,
            parts: Vec::new(),
        }
    }

    pub fn single(t: Twist, mult: u64) -> Self {
        Self::from_parts(t.len(), vec![(t, mult)])
    }

    pub fn parts(&self) -> &[(Twist, u64)] {
        &self.parts
    }

    pub fn twist_len(&self) -> usize {
        self.twist_len
    }

    pub fn rank(&self) -> u64 {
        self.parts.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn c1(&self) -> Twist {
        self.parts
            .iter()
            .fold(Twist::zero(self.twist_len), |acc, (t, m)| &acc + &t.scale(*m as i64))
    }

    /// One twist per copy, in row order.
    pub fn copies(&self) -> Vec<Twist> {
        self.parts
            .iter()
            .flat_map(|(t, m)| std::iter::repeat_n(t.clone(), *m as usize))
            .collect()
    }

    /// Parts with equal twists merged, sorted by twist.
    pub fn merged_parts(&self) -> Vec<(Twist, u64)> {
        let mut m: BTreeMap<Twist, u64> = BTreeMap::new();
        for (t, k) in &self.parts {
            *m.entry(t.clone()).or_insert(0) += k;
        }
        m.into_iter().collect()
    }

    /// `S (x) O(b)`.
    pub fn twisted(&self, b: &Twist) -> Self {
        Self {
            twist_len: self.twist_len,
            parts: self.parts.iter().map(|(t, m)| (t + b, *m)).collect(),
        }
    }

    pub fn dual(&self) -> Self {
        Self {
            twist_len: self.twist_len,
            parts: self.parts.iter().map(|(t, m)| (-t, *m)).collect(),
        }
    }

    /// Distinct twists in first-appearance order.
    pub fn distinct_twists(&self) -> Vec<Twist> {
        let mut seen = Vec::new();
        for (t, _) in &self.parts {
            if !seen.contains(t) {
                seen.push(t.clone());
            }
        }
        seen
    }
}

impl std::fmt::Display for LineBundleSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(t, m)| if *m == 1 { format!("O{t}") } else { format!("O{t}^{m}") })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Which twists a descriptor assigns to its three sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// The twists displayed with the original construction.
    Paper,
    /// `s = 1` twists under which every matrix entry is a section of the
    /// right line bundle.
    Homogeneous,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Profile::Paper),
            "homogeneous" => Ok(Profile::Homogeneous),
            other => Err(format!("unknown profile {other:?} (expected paper|homogeneous)")),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Paper => "paper",
            Profile::Homogeneous => "homogeneous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `(n+k) x k`, entry `(r,c) = v_{r-c}^a` on the band `0 <= r-c <= n`.
    Forward,
    /// `k x (n+k)`, entry `(r,t) = v_{n-(t-r)}^a` on the band `0 <= t-r <= n`.
    Reversed,
}

/// One banded block in the variables `v = family^{(group)}`.
pub fn banded_block(
    n: u32,
    k: u32,
    alpha: u32,
    family: Family,
    group: u32,
    orientation: Orientation,
) -> Result<PolyMatrix> {
    if n == 0 || k == 0 || alpha == 0 || group == 0 {
        return Err(Error::OutOfRange(format!(
            "banded block needs n, k, alpha, group >= 1 (got n={n}, k={k}, alpha={alpha}, group={group})"
        )));
    }
    let (n, k) = (n as usize, k as usize);
    let var = |j: usize| Var {
        group,
        family,
        index: j as u32,
    };
    let entry = |j: usize| Poly::monomial(1, Monomial::power(var(j), alpha));
    Ok(match orientation {
        Orientation::Forward => {
            let mut m = PolyMatrix::zeros(n + k, k);
            for c in 0..k {
                for j in 0..=n {
                    m.set(c + j, c, entry(j));
                }
            }
            m
        }
        Orientation::Reversed => {
            let mut m = PolyMatrix::zeros(k, n + k);
            for r in 0..k {
                for d in 0..=n {
                    m.set(r, r + d, entry(n - d));
                }
            }
            m
        }
    })
}

/// Everything needed to reason about one monad instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadDescriptor {
    pub space: SpaceSpec,
    pub pol: Polarization,
    pub k: u32,
    pub profile: Profile,
    /// Set when the three sums were replaced after construction.
    pub overridden: bool,
    pub source: LineBundleSum,
    pub middle: LineBundleSum,
    pub target: LineBundleSum,
    pub a_mat: PolyMatrix,
    pub b_mat: PolyMatrix,
}

/// Builds the banded matrices and the profile's twists.
///
/// `a_mat` stacks `[forward x-block; forward y-block]` over the groups and
/// `b_mat` concatenates `[reversed y-block | -reversed x-block]`, which makes
/// `b_mat * a_mat` telescope to zero. `k = 0` yields empty maps.
pub fn build_monad(space: &SpaceSpec, pol: &Polarization, k: u32, profile: Profile) -> Result<MonadDescriptor> {
    pol.check_space(space)?;
    if profile == Profile::Homogeneous && space.s() != 1 {
        return Err(Error::ProfileMismatch(format!(
            "the homogeneous profile needs s = 1, got s = {}",
            space.s()
        )));
    }
    let len = space.slots();
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    let mut middle_parts = Vec::new();
    for (i, (&n, &alpha)) in space.dims().iter().zip(pol.alphas()).enumerate() {
        let group = i as u32 + 1;
        let mult = u64::from(n + k);
        let a = -i64::from(alpha);
        // x-rows pair with slot (i,2) and y-rows with slot (i,1).
        middle_parts.push((Twist::unit(len, 2 * i + 1).scale(a), mult));
        middle_parts.push((Twist::unit(len, 2 * i).scale(a), mult));
        if k > 0 {
            a_blocks.push(banded_block(n, k, alpha, Family::X, group, Orientation::Forward)?);
            a_blocks.push(banded_block(n, k, alpha, Family::Y, group, Orientation::Forward)?);
            b_blocks.push(banded_block(n, k, alpha, Family::Y, group, Orientation::Reversed)?);
            b_blocks.push(banded_block(n, k, alpha, Family::X, group, Orientation::Reversed)?.neg());
        }
    }
    let middle = LineBundleSum::from_parts(len, middle_parts);
    let (a_mat, b_mat) = if k == 0 {
        let r = middle.rank() as usize;
        (PolyMatrix::zeros(r, 0), PolyMatrix::zeros(0, r))
    } else {
        (PolyMatrix::vstack(&a_blocks)?, PolyMatrix::hstack(&b_blocks)?)
    };
    let lbar = pol.expansion();
    let (source, target) = match profile {
        Profile::Paper => (
            LineBundleSum::single(-&lbar, u64::from(k)),
            LineBundleSum::single(lbar.clone(), u64::from(k)),
        ),
        Profile::Homogeneous => (
            LineBundleSum::single(-&lbar, u64::from(k)),
            LineBundleSum::single(Twist::zero(len), u64::from(k)),
        ),
    };
    Ok(MonadDescriptor {
        space: space.clone(),
        pol: pol.clone(),
        k,
        profile,
        overridden: false,
        source,
        middle,
        target,
        a_mat,
        b_mat,
    })
}

impl MonadDescriptor {
    /// Replaces any of the three sums; ranks must still match the matrices.
    pub fn with_sums(
        mut self,
        source: Option<LineBundleSum>,
        middle: Option<LineBundleSum>,
        target: Option<LineBundleSum>,
    ) -> Result<Self> {
        for (name, sum, want) in [
            ("source", &source, self.a_mat.cols()),
            ("middle", &middle, self.a_mat.rows()),
            ("target", &target, self.b_mat.rows()),
        ] {
            if let Some(s) = sum {
                if s.twist_len() != self.space.slots() {
                    return Err(Error::TwistLength {
                        expected: self.space.slots(),
                        got: s.twist_len(),
                    });
                }
                if s.rank() as usize != want {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} override has rank {}, matrices need {want}",
                        s.rank()
                    )));
                }
            }
        }
        if source.is_some() || middle.is_some() || target.is_some() {
            self.overridden = true;
        }
        if let Some(s) = source {
            self.source = s;
        }
        if let Some(s) = middle {
            self.middle = s;
        }
        if let Some(s) = target {
            self.target = s;
        }
        Ok(self)
    }

    /// Checks that matrix shapes agree with the sums.
    pub fn check_shapes(&self) -> Result<()> {
        let (src, mid, tgt) = (
            self.source.rank() as usize,
            self.middle.rank() as usize,
            self.target.rank() as usize,
        );
        if (self.a_mat.rows(), self.a_mat.cols()) != (mid, src) {
            return Err(Error::DimensionMismatch(format!(
                "a_mat is {}x{}, sums need {mid}x{src}",
                self.a_mat.rows(),
                self.a_mat.cols()
            )));
        }
        if (self.b_mat.rows(), self.b_mat.cols()) != (tgt, mid) {
            return Err(Error::DimensionMismatch(format!(
                "b_mat is {}x{}, sums need {tgt}x{mid}",
                self.b_mat.rows(),
                self.b_mat.cols()
            )));
        }
        Ok(())
    }

    /// Coordinates of the space, all groups and both families.
    pub fn coordinates(&self) -> Vec<Var> {
        let mut vars = Vec::new();
        for (i, &n) in self.space.dims().iter().enumerate() {
            for family in [Family::X, Family::Y] {
                for j in 0..=n {
                    vars.push(Var {
                        group: i as u32 + 1,
                        family,
                        index: j,
                    });
                }
            }
        }
        vars
    }
}

/// Result of the symbolic composition test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeReport {
    pub passed: bool,
    /// First nonzero entry of `b_mat * a_mat`, if any.
    pub residual: Option<(usize, usize, Poly)>,
}

pub fn compose_check(md: &MonadDescriptor) -> Result<ComposeReport> {
    let prod = md.b_mat.mat_mul(&md.a_mat)?;
    let residual = prod.entries().next().map(|(r, c, p)| (r, c, p.clone()));
    Ok(ComposeReport {
        passed: residual.is_none(),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixName {
    #[serde(rename = "a_mat")]
    A,
    #[serde(rename = "b_mat")]
    B,
}

impl std::fmt::Display for MatrixName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixName::A => "a_mat",
            MatrixName::B => "b_mat",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryMismatch {
    pub matrix: MatrixName,
    pub row: usize,
    pub col: usize,
    /// `None` when the entry itself is inhomogeneous.
    pub found: Option<Twist>,
    pub required: Twist,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneityReport {
    pub checked: usize,
    pub mismatches: Vec<EntryMismatch>,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares each entry's multidegree with `rowTwist - colTwist`.
pub fn homogeneity_check(md: &MonadDescriptor) -> Result<HomogeneityReport> {
    md.check_shapes()?;
    let slots = md.space.slots();
    let src = md.source.copies();
    let mid = md.middle.copies();
    let tgt = md.target.copies();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for (name, m, rows, cols) in [
        (MatrixName::A, &md.a_mat, &mid, &src),
        (MatrixName::B, &md.b_mat, &tgt, &mid),
    ] {
        for (r, c, p) in m.entries() {
            checked += 1;
            let required = &rows[r] - &cols[c];
            let found = match p.multidegree(slots)? {
                Homogeneity::Homogeneous(t) => Some(t),
                Homogeneity::Inhomogeneous => None,
            };
            if found.as_ref() != Some(&required) {
                mismatches.push(EntryMismatch {
                    matrix: name,
                    row: r,
                    col: c,
                    found,
                    required,
                });
            }
        }
    }
    Ok(HomogeneityReport { checked, mismatches })
}

/// Structural evidence for one banded block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralCheck {
    pub matrix: MatrixName,
    pub group: u32,
    pub family: Family,
    /// Leading indices `j` whose triangular minor was verified.
    pub leads_verified: Vec<u32>,
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub trial: u64,
    pub a_rank: usize,
    pub b_rank: usize,
    pub ok: bool,
    /// Coordinates of the sample point, in [`MonadDescriptor::coordinates`] order.
    pub point: Vec<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub expected_a: usize,
    pub expected_b: usize,
    pub structural: Vec<StructuralCheck>,
    pub trials: Vec<TrialResult>,
    pub prime: u64,
    pub seed: u64,
}

impl RankReport {
    pub fn structural_ok(&self) -> bool {
        self.structural.iter().all(|s| s.violation.is_none())
    }

    pub fn randomized_ok(&self) -> bool {
        !self.trials.is_empty() && self.trials.iter().all(|t| t.ok)
    }

    pub fn passed(&self) -> bool {
        self.structural_ok() && self.randomized_ok()
    }

    pub fn first_failed_trial(&self) -> Option<&TrialResult> {
        self.trials.iter().find(|t| !t.ok)
    }
}

/// Maximal-rank evidence for both maps.
///
/// Structural part: at a point whose first nonvanishing `v`-coordinate is
/// `v_j`, the `k x k` minor of each band at offset `j` is triangular with
/// `v_j^a` on the diagonal, hence invertible. Checked symbolically for every
/// `j`. Randomized part: rank at `trials` points over `F_prime` whose
/// coordinates are all nonzero.
pub fn rank_certificate(md: &MonadDescriptor, trials: u64, prime: u64, seed: u64) -> Result<RankReport> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let expected_a = md.a_mat.rows().min(md.a_mat.cols());
    let expected_b = md.b_mat.rows().min(md.b_mat.cols());
    let structural = structural_checks(md);
    let coords = md.coordinates();
    let results = exec::map_range(trials as usize, |t| run_trial(md, &coords, t as u64, prime, seed));
    let trials = results
        .into_iter()
        .map(|mut r| {
            r.ok = r.error.is_none() && r.a_rank == expected_a && r.b_rank == expected_b;
            r
        })
        .collect();
    Ok(RankReport {
        expected_a,
        expected_b,
        structural,
        trials,
        prime,
        seed,
    })
}

fn run_trial(md: &MonadDescriptor, coords: &[Var], trial: u64, prime: u64, seed: u64) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let values: Vec<u64> = coords.iter().map(|_| rng.gen_range(1..prime)).collect();
    let point: Assignment = coords
        .iter()
        .zip(&values)
        .map(|(v, &x)| (*v, BigRational::from_integer(BigInt::from(x))))
        .collect();
    let eval = |m: &PolyMatrix| evaluate(m, &point, Field::Prime(prime)).map(|n| numeric_rank(&n));
    match (eval(&md.a_mat), eval(&md.b_mat)) {
        (Ok(a_rank), Ok(b_rank)) => TrialResult {
            trial,
            a_rank,
            b_rank,
            ok: true,
            point: values,
            error: None,
        },
        (Err(e), _) | (_, Err(e)) => TrialResult {
            trial,
            a_rank: 0,
            b_rank: 0,
            ok: false,
            point: values,
            error: Some(e.to_string()),
        },
    }
}

fn structural_checks(md: &MonadDescriptor) -> Vec<StructuralCheck> {
    let k = md.k as usize;
    let mut out = Vec::new();
    let mut offset = 0usize;
    for (i, (&n, &alpha)) in md.space.dims().iter().zip(md.pol.alphas()).enumerate() {
        let group = i as u32 + 1;
        let width = n as usize + k;
        // a_mat: forward x-block then forward y-block, stacked.
        // b_mat: reversed y-block then reversed x-block, concatenated.
        for (slot, a_family, b_family) in [(0usize, Family::X, Family::Y), (1usize, Family::Y, Family::X)] {
            let base = offset + slot * width;
            out.push(check_band(md, MatrixName::A, group, a_family, n, alpha, k, base));
            out.push(check_band(md, MatrixName::B, group, b_family, n, alpha, k, base));
        }
        offset += 2 * width;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn check_band(
    md: &MonadDescriptor,
    matrix: MatrixName,
    group: u32,
    family: Family,
    n: u32,
    alpha: u32,
    k: usize,
    base: usize,
) -> StructuralCheck {
    let mut check = StructuralCheck {
        matrix,
        group,
        family,
        leads_verified: Vec::new(),
        violation: None,
    };
    let (m, k_dim, band_dim) = match matrix {
        MatrixName::A => (&md.a_mat, md.a_mat.cols(), md.a_mat.rows()),
        MatrixName::B => (&md.b_mat, md.b_mat.rows(), md.b_mat.cols()),
    };
    if k_dim != k || band_dim < base + n as usize + k {
        check.violation = Some(format!(
            "{matrix} shape {}x{} does not hold a width-{k} band at offset {base}",
            m.rows(),
            m.cols()
        ));
        return check;
    }
    for j in 0..=n {
        // (row, col) of minor entry (a, b) in the matrix.
        let at = |a: usize, b: usize| -> (usize, usize) {
            match matrix {
                MatrixName::A => (base + j as usize + a, b),
                MatrixName::B => (a, base + (n - j) as usize + b),
            }
        };
        let lead = Var {
            group,
            family,
            index: j,
        };
        let vanishes = |p: &Poly| {
            p.terms().all(|(mono, _)| {
                mono.factors()
                    .iter()
                    .any(|(v, _)| v.group == group && v.family == family && v.index < j)
            })
        };
        for a in 0..k {
            for b in 0..k {
                let (r, c) = at(a, b);
                let entry = m.get(r, c);
                let ok = if a == b {
                    entry.is_some_and(|p| is_signed_power(p, lead, alpha))
                } else if a < b {
                    // index j + a - b < j in both orientations
                    entry.is_none_or(vanishes)
                } else {
                    true
                };
                if !ok {
                    check.violation = Some(format!(
                        "{matrix} group {group} {family:?} lead {j}: minor entry ({a},{b}) at ({r},{c}) is {}",
                        entry.map_or_else(|| "0".to_string(), Poly::to_string)
                    ));
                    return check;
                }
            }
        }
        check.leads_verified.push(j);
    }
    check
}

fn is_signed_power(p: &Poly, v: Var, e: u32) -> bool {
    let mut it = p.terms();
    match (it.next(), it.next()) {
        (Some((m, c)), None) => {
            *m == Monomial::power(v, e) && (c.numer() == c.denom() || -c.numer() == *c.denom())
        }
        _ => false,
    }
}

/// Invariants of the kernel bundle `K = ker(b_mat)` and of `E = K / im(a_mat)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelInvariants {
    pub kernel: BundleInvariants,
    pub cohomology: BundleInvariants,
}

pub fn kernel_invariants(md: &MonadDescriptor) -> Result<KernelInvariants> {
    let form = DegreeForm::new(&md.space, &md.pol)?;
    kernel_invariants_with(md, &form)
}

pub fn kernel_invariants_with(md: &MonadDescriptor, form: &DegreeForm) -> Result<KernelInvariants> {
    let (mid, tgt, src) = (md.middle.rank(), md.target.rank(), md.source.rank());
    if mid <= tgt + src {
        return Err(Error::OutOfRange(format!(
            "ranks {src} -> {mid} -> {tgt} leave no cohomology bundle"
        )));
    }
    let c1_k = &md.middle.c1() - &md.target.c1();
    let c1_e = &c1_k - &md.source.c1();
    Ok(KernelInvariants {
        kernel: picard::invariants_with(form, &md.space, mid - tgt, &c1_k)?,
        cohomology: picard::invariants_with(form, &md.space, mid - tgt - src, &c1_e)?,
    })
}

/// Advisory existence test for linear monads
/// `O(-1)^a -> O^b -> O(1)^c` on `P^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// Which of the two sufficient conditions held (1 or 2).
    Feasible(u8),
    Infeasible,
}

pub fn floystad_check(a: u64, b: u64, c: u64, big_n: u64) -> Result<Feasibility> {
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    if b >= a + c && b + 1 >= 2 * c + big_n {
        Ok(Feasibility::Feasible(1))
    } else if b >= a + c + big_n {
        Ok(Feasibility::Feasible(2))
    } else {
        Ok(Feasibility::Infeasible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(d: &[u32]) -> SpaceSpec {
        SpaceSpec::new(d.to_vec()).unwrap()
    }

    fn pol(a: &[u32]) -> Polarization {
        Polarization::new(a.to_vec()).unwrap()
    }

    fn v(family: Family, group: u32, j: u32) -> Poly {
        Poly::var(Var {
            group,
            family,
            index: j,
        })
    }

    #[test]
    fn banded_block_examples() {
        let f = banded_block(1, 1, 1, Family::X, 1, Orientation::Forward).unwrap();
        assert_eq!(
            f,
            PolyMatrix::from_rows(vec![vec![v(Family::X, 1, 0)], vec![v(Family::X, 1, 1)]]).unwrap()
        );
        let r = banded_block(1, 1, 1, Family::Y, 1, Orientation::Reversed).unwrap();
        assert_eq!(
            r,
            PolyMatrix::from_rows(vec![vec![v(Family::Y, 1, 1), v(Family::Y, 1, 0)]]).unwrap()
        );
        let f = banded_block(1, 2, 1, Family::X, 1, Orientation::Forward).unwrap();
        let x = |j| v(Family::X, 1, j);
        assert_eq!(
            f,
            PolyMatrix::from_rows(vec![
                vec![x(0), Poly::zero()],
                vec![x(1), x(0)],
                vec![Poly::zero(), x(1)],
            ])
            .unwrap()
        );
        assert!(banded_block(0, 1, 1, Family::X, 1, Orientation::Forward).is_err());
        assert!(banded_block(1, 0, 1, Family::X, 1, Orientation::Forward).is_err());
        assert!(banded_block(1, 1, 0, Family::X, 1, Orientation::Forward).is_err());
    }

    #[test]
    fn homogeneous_smallest_instance() {
        let md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Homogeneous).unwrap();
        let x = |j| v(Family::X, 1, j);
        let y = |j| v(Family::Y, 1, j);
        assert_eq!(
            md.a_mat,
            PolyMatrix::from_rows(vec![vec![x(0)], vec![x(1)], vec![y(0)], vec![y(1)]]).unwrap()
        );
        assert_eq!(
            md.b_mat,
            PolyMatrix::from_rows(vec![vec![y(1), y(0), x(1).neg(), x(0).neg()]]).unwrap()
        );
        assert_eq!(md.middle.rank(), 4);
        let h = homogeneity_check(&md).unwrap();
        assert_eq!(h.checked, 8);
        assert!(h.passed());
    }

    #[test]
    fn paper_profile_twists_and_mismatches() {
        let md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Paper).unwrap();
        let homog = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Homogeneous).unwrap();
        assert_eq!((md.a_mat.clone(), md.b_mat.clone()), (homog.a_mat, homog.b_mat));
        assert_eq!(md.target, LineBundleSum::single(Twist::new(vec![1, 1]), 1));
        assert_eq!(md.source, LineBundleSum::single(Twist::new(vec![-1, -1]), 1));
        let h = homogeneity_check(&md).unwrap();
        let b_fail: Vec<_> = h.mismatches.iter().filter(|m| m.matrix == MatrixName::B).collect();
        assert_eq!(b_fail.len(), 4);
        for m in b_fail {
            assert!(
                m.required == Twist::new(vec![2, 1]) || m.required == Twist::new(vec![1, 2]),
                "{:?}",
                m.required
            );
        }
    }

    #[test]
    fn two_group_assembly() {
        let md = build_monad(&sp(&[1, 1]), &pol(&[1, 1]), 1, Profile::Paper).unwrap();
        let expect_b = PolyMatrix::from_rows(vec![vec![
            v(Family::Y, 1, 1),
            v(Family::Y, 1, 0),
            v(Family::X, 1, 1).neg(),
            v(Family::X, 1, 0).neg(),
            v(Family::Y, 2, 1),
            v(Family::Y, 2, 0),
            v(Family::X, 2, 1).neg(),
            v(Family::X, 2, 0).neg(),
        ]])
        .unwrap();
        assert_eq!(md.b_mat, expect_b);
        assert_eq!((md.a_mat.rows(), md.a_mat.cols()), (8, 1));
        assert!(compose_check(&md).unwrap().passed);
    }

    #[test]
    fn homogeneous_needs_one_group() {
        assert!(matches!(
            build_monad(&sp(&[1, 1]), &pol(&[1, 1]), 1, Profile::Homogeneous),
            Err(Error::ProfileMismatch(_))
        ));
    }

    #[test]
    fn sign_flip_breaks_composition() {
        let mut md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Homogeneous).unwrap();
        // un-negate the x-block of b_mat
        let mut b = md.b_mat.clone();
        for c in 2..4 {
            let p = b.get(0, c).unwrap().neg();
            b.set(0, c, p);
        }
        md.b_mat = b;
        let r = compose_check(&md).unwrap();
        assert!(!r.passed);
        let (_, _, p) = r.residual.unwrap();
        assert_eq!(p.to_string(), "+2·x1_0^1·y1_1^1 +2·x1_1^1·y1_0^1");
    }

    #[test]
    fn transposed_orientation_fails_off_diagonal() {
        // Using forward blocks transposed in b_mat does not telescope once k >= 2.
        let space = sp(&[1]);
        let md = build_monad(&space, &pol(&[1]), 2, Profile::Homogeneous).unwrap();
        let t = |f: Family| {
            let fwd = banded_block(1, 2, 1, f, 1, Orientation::Forward).unwrap();
            let mut m = PolyMatrix::zeros(2, 3);
            for (r, c, p) in fwd.entries() {
                m.set(c, r, p.clone());
            }
            m
        };
        let b = PolyMatrix::hstack(&[t(Family::Y), t(Family::X).neg()]).unwrap();
        let prod = b.mat_mul(&md.a_mat).unwrap();
        assert!(!prod.is_zero());
        assert!(prod.entries().all(|(r, c, _)| r != c));
    }

    #[test]
    fn degenerate_k_zero() {
        let md = build_monad(&sp(&[2]), &pol(&[1]), 0, Profile::Paper).unwrap();
        assert!(compose_check(&md).unwrap().passed);
        assert!(homogeneity_check(&md).unwrap().passed());
        let inv = kernel_invariants(&md).unwrap();
        assert_eq!(inv.cohomology.rank, md.middle.rank());
    }

    #[test]
    fn rank_certificate_smallest_instance() {
        let md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Homogeneous).unwrap();
        let rep = rank_certificate(&md, 100, crate::DEFAULT_PRIME, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.trials.iter().all(|t| t.a_rank == 1 && t.b_rank == 1));
        assert!(rep.structural.iter().all(|s| s.leads_verified == vec![0, 1]));
        assert!(rank_certificate(&md, 0, 7, 0).is_err());
    }

    #[test]
    fn structural_witness_for_wider_bands() {
        for (n, k) in [(1, 2), (2, 2), (2, 3)] {
            let md = build_monad(&sp(&[n]), &pol(&[2]), k, Profile::Homogeneous).unwrap();
            let rep = rank_certificate(&md, 5, crate::DEFAULT_PRIME, 3).unwrap();
            assert!(rep.structural_ok(), "n={n} k={k}: {:?}", rep.structural);
            assert!(rep.passed());
        }
    }

    #[test]
    fn duplicated_column_fails_randomized_part() {
        let mut md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Homogeneous).unwrap();
        let col = md.a_mat.clone();
        md.a_mat = PolyMatrix::hstack(&[col.clone(), col]).unwrap();
        md.source = LineBundleSum::single(Twist::new(vec![-1, -1]), 2);
        let rep = rank_certificate(&md, 10, crate::DEFAULT_PRIME, 1).unwrap();
        assert!(!rep.randomized_ok());
        assert_eq!(rep.first_failed_trial().unwrap().a_rank, 1);
        assert!(!rep.passed());
    }

    #[test]
    fn kernel_invariants_examples() {
        let md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Paper).unwrap();
        let inv = kernel_invariants(&md).unwrap();
        assert_eq!(inv.kernel.rank, 3);
        assert_eq!(inv.kernel.c1, Twist::new(vec![-3, -3]));
        assert_eq!(inv.kernel.degree, BigInt::from(-6));
        assert_eq!(inv.cohomology.rank, 2);
        assert_eq!(inv.cohomology.c1, Twist::new(vec![-2, -2]));

        let md = build_monad(&sp(&[1, 1]), &pol(&[1, 1]), 1, Profile::Paper).unwrap();
        let inv = kernel_invariants(&md).unwrap();
        assert_eq!((inv.kernel.rank, inv.cohomology.rank), (7, 6));
    }

    #[test]
    fn floystad_examples() {
        assert_eq!(floystad_check(1, 4, 1, 3).unwrap(), Feasibility::Feasible(1));
        assert_eq!(floystad_check(1, 2, 1, 3).unwrap(), Feasibility::Infeasible);
        assert_eq!(floystad_check(0, 1, 0, 1).unwrap(), Feasibility::Feasible(1));
        assert_eq!(floystad_check(0, 4, 3, 2).unwrap(), Feasibility::Infeasible);
        assert_eq!(floystad_check(1, 9, 4, 4).unwrap(), Feasibility::Feasible(2));
        assert!(floystad_check(1, 1, 1, 0).is_err());
    }

    #[test]
    fn override_rank_checked() {
        let md = build_monad(&sp(&[1]), &pol(&[1]), 1, Profile::Paper).unwrap();
        let bad = LineBundleSum::single(Twist::new(vec![0, 0]), 2);
        assert!(md.clone().with_sums(None, None, Some(bad)).is_err());
        let ok = LineBundleSum::single(Twist::new(vec![0, 0]), 1);
        let md = md.with_sums(None, None, Some(ok)).unwrap();
        assert!(md.overridden);
    }
}
