//! Brute-force global sections.
//!
//! Sections of `O(a)` are identified with monomials of multidegree `a`, and
//! a matrix of polynomials acts on them by multiplication. Kernel dimensions
//! of the induced linear maps give `h^0` of kernel sheaves by left exactness.
//! Nothing here consults [`crate::cohom`], so the two can check each other.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::monad::{homogeneity_check, LineBundleSum, MonadDescriptor};
use crate::picard::{SpaceSpec, Twist};
use crate::polyalg::{rank_sparse, Family, Monomial, PolyMatrix, RankMethod, SparseColumns, Var};

/// Lex-ordered monomial basis of `H^0(O(a))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionBasis {
    pub twist: Twist,
    pub monomials: Vec<Monomial>,
}

impl SectionBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn index(&self) -> HashMap<&Monomial, usize> {
        self.monomials.iter().enumerate().map(|(i, m)| (m, i)).collect()
    }
}

fn slot_var(slot: usize, index: u32) -> Var {
    Var {
        group: (slot / 2) as u32 + 1,
        family: if slot.is_multiple_of(2) { Family::X } else { Family::Y },
        index,
    }
}

/// Exponent vectors of length `vars` summing to `deg`.
fn compositions(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    if vars == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in compositions(vars - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn section_basis(space: &SpaceSpec, a: &Twist) -> Result<SectionBasis> {
    space.check_twist(a)?;
    if !a.is_nonnegative() {
        return Ok(SectionBasis {
            twist: a.clone(),
            monomials: Vec::new(),
        });
    }
    let mut partial: Vec<Vec<(Var, u32)>> = vec![Vec::new()];
    for slot in 0..space.slots() {
        let n = space.slot_dim(slot);
        let slot_monos = compositions(n as usize + 1, a[slot] as u32);
        let mut next = Vec::with_capacity(partial.len() * slot_monos.len());
        for p in &partial {
            for exps in &slot_monos {
                let mut f = p.clone();
                f.extend(
                    exps.iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(j, &e)| (slot_var(slot, j as u32), e)),
                );
                next.push(f);
            }
        }
        partial = next;
    }
    let mut monomials: Vec<Monomial> = partial.into_iter().map(Monomial::from_factors).collect();
    monomials.sort();
    Ok(SectionBasis {
        twist: a.clone(),
        monomials,
    })
}

/// `h^D(O(a))` as the size of the basis at the Serre-dual twist.
pub fn serre_h_top(space: &SpaceSpec, a: &Twist) -> Result<usize> {
    space.check_twist(a)?;
    let dual: Vec<i64> = (0..space.slots())
        .map(|j| -a[j] - i64::from(space.slot_dim(j)) - 1)
        .collect();
    Ok(section_basis(space, &Twist::new(dual))?.len())
}

/// `h^0` of a split sum by enumerating monomials.
pub fn ambient_h0(space: &SpaceSpec, s: &LineBundleSum) -> Result<usize> {
    let mut total = 0;
    for (t, m) in s.parts() {
        total += section_basis(space, t)?.len() * *m as usize;
    }
    Ok(total)
}

/// Limits and field for the kernel computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Largest domain (columns) attempted at all.
    pub budget: usize,
    /// Largest domain eliminated over the rationals; above it, `F_prime`.
    pub exact_limit: usize,
    pub prime: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            budget: 20_000,
            exact_limit: 4_000,
            prime: crate::DEFAULT_PRIME,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "lowercase")]
pub enum Elimination {
    Rational,
    Modular { p: u64 },
}

/// A kernel dimension with the sizes that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelDim {
    pub kernel: usize,
    pub domain: usize,
    pub codomain: usize,
    pub rank: usize,
    pub method: Elimination,
}

impl KernelDim {
    /// A modular rank never exceeds the rational one, so a zero kernel mod
    /// `p` is already exact; only a positive modular kernel is uncertain.
    pub fn probabilistic(&self) -> bool {
        matches!(self.method, Elimination::Modular { .. }) && self.kernel > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Computed(KernelDim),
    TooLarge { domain: BigUint, budget: usize },
}

impl OracleOutcome {
    pub fn kernel(&self) -> Option<usize> {
        match self {
            OracleOutcome::Computed(k) => Some(k.kernel),
            OracleOutcome::TooLarge { .. } => None,
        }
    }
}

/// Matrix of a polynomial map on global sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub domain: Vec<SectionBasis>,
    pub codomain: Vec<SectionBasis>,
    pub matrix: SparseColumns,
}

fn require_homogeneous(md: &MonadDescriptor) -> Result<()> {
    let rep = homogeneity_check(md)?;
    match rep.mismatches.first() {
        None => Ok(()),
        Some(m) => Err(Error::Inhomogeneous(format!(
            "{} entry ({},{}) has degree {} but the sums need {} ({} mismatches)",
            m.matrix,
            m.row,
            m.col,
            m.found.as_ref().map_or("inhomogeneous".to_string(), Twist::to_string),
            m.required,
            rep.mismatches.len()
        ))),
    }
}

fn int_coeff(c: &num_rational::BigRational) -> Result<i64> {
    if !c.is_integer() {
        return Err(Error::OutOfRange(format!("non-integral coefficient {c}")));
    }
    c.to_integer()
        .to_i64()
        .ok_or_else(|| Error::OutOfRange(format!("coefficient {c} exceeds 64 bits")))
}

/// Map `H^0(middle(B)) -> H^0(target(B))` given by `b_mat`.
pub fn induced_map(md: &MonadDescriptor, b: &Twist) -> Result<InducedMap> {
    require_homogeneous(md)?;
    md.space.check_twist(b)?;
    let domain: Vec<SectionBasis> = md
        .middle
        .copies()
        .iter()
        .map(|t| section_basis(&md.space, &(t + b)))
        .collect::<Result<_>>()?;
    let codomain: Vec<SectionBasis> = md
        .target
        .copies()
        .iter()
        .map(|t| section_basis(&md.space, &(t + b)))
        .collect::<Result<_>>()?;
    let offsets = prefix_offsets(codomain.iter().map(SectionBasis::len));
    let indices: Vec<_> = codomain.iter().map(SectionBasis::index).collect();
    let mut matrix = SparseColumns::new(offsets[codomain.len()]);
    for (t, basis) in domain.iter().enumerate() {
        let col = md.b_mat.column(t);
        for f in &basis.monomials {
            let mut entries = BTreeMap::new();
            for (r, p) in &col {
                for (m, c) in p.terms() {
                    let prod = m.mul(f);
                    let idx = indices[*r].get(&prod).ok_or_else(|| {
                        Error::Inhomogeneous(format!("b_mat({r},{t}) does not map into target row {r}"))
                    })?;
                    *entries.entry(offsets[*r] + idx).or_insert(0i64) += int_coeff(c)?;
                }
            }
            matrix
                .columns
                .push(entries.into_iter().filter(|(_, v)| *v != 0).collect());
        }
    }
    Ok(InducedMap {
        domain,
        codomain,
        matrix,
    })
}

fn prefix_offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

fn eliminate(m: &SparseColumns, codomain: usize, opts: &OracleOptions) -> KernelDim {
    let method = if m.cols() <= opts.exact_limit {
        Elimination::Rational
    } else {
        Elimination::Modular { p: opts.prime }
    };
    let rank = match method {
        Elimination::Rational => rank_sparse(m, RankMethod::Exact),
        Elimination::Modular { p } => rank_sparse(m, RankMethod::Modular(p)),
    };
    KernelDim {
        kernel: m.cols() - rank,
        domain: m.cols(),
        codomain,
        rank,
        method,
    }
}

/// `h^0(K(B))` for `K = ker(b_mat)`.
pub fn h0_kernel(md: &MonadDescriptor, b: &Twist, opts: &OracleOptions) -> Result<OracleOutcome> {
    let domain = ambient_size(md, &md.middle.twisted(b))?;
    if domain > BigUint::from(opts.budget) {
        return Ok(OracleOutcome::TooLarge {
            domain,
            budget: opts.budget,
        });
    }
    let map = induced_map(md, b)?;
    Ok(OracleOutcome::Computed(eliminate(&map.matrix, map.matrix.rows, opts)))
}

fn ambient_size(md: &MonadDescriptor, s: &LineBundleSum) -> Result<BigUint> {
    crate::cohom::Cohomology::global().h0_sum(&md.space, s)
}

/// All `q`-subsets of `0..n` in lex order.
fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(q);
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (q - cur.len()) {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    if q <= n {
        rec(0, n, q, &mut cur, &mut out);
    }
    out
}

fn subset_twist(copies: &[Twist], s: &[usize], base: &Twist) -> Twist {
    s.iter().fold(base.clone(), |acc, &i| &acc + &copies[i])
}

/// `h^0(wedge^q K (B))` as the kernel of the contraction
/// `e_S -> sum_{t in S} (-1)^{pos(t,S)} b_mat[:,t] (x) e_{S \ t}`
/// on global sections.
pub fn h0_wedge_kernel(md: &MonadDescriptor, q: usize, b: &Twist, opts: &OracleOptions) -> Result<OracleOutcome> {
    let mid_rank = md.middle.rank() as usize;
    if q == 0 || q > mid_rank {
        return Err(Error::OutOfRange(format!(
            "wedge power {q} outside 1..={mid_rank}"
        )));
    }
    require_homogeneous(md)?;
    md.space.check_twist(b)?;
    let wedge = crate::cohom::exterior_power(&md.middle, q as u64)?;
    let domain_size = ambient_size(md, &wedge.twisted(b))?;
    if domain_size > BigUint::from(opts.budget) {
        return Ok(OracleOutcome::TooLarge {
            domain: domain_size,
            budget: opts.budget,
        });
    }
    let space = &md.space;
    let mid = md.middle.copies();
    let tgt = md.target.copies();

    let dom_sets: Vec<(Vec<usize>, SectionBasis)> = subsets(mid.len(), q)
        .into_iter()
        .map(|s| {
            let t = subset_twist(&mid, &s, b);
            section_basis(space, &t).map(|basis| (s, basis))
        })
        .filter(|r| r.as_ref().map_or(true, |(_, basis)| !basis.is_empty()))
        .collect::<Result<_>>()?;

    // Codomain blocks (target row r, (q-1)-subset), only nonempty ones.
    let mut cod_index: HashMap<(usize, Vec<usize>), (usize, HashMap<Monomial, usize>)> = HashMap::new();
    let mut rows = 0usize;
    for r in 0..tgt.len() {
        for s in subsets(mid.len(), q - 1) {
            let t = subset_twist(&mid, &s, &(&tgt[r] + b));
            let basis = section_basis(space, &t)?;
            if basis.is_empty() {
                continue;
            }
            let idx = basis.monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            cod_index.insert((r, s), (rows, idx));
            rows += basis.len();
        }
    }

    let blocks = exec::map(&dom_sets, |(s, basis)| wedge_columns(md, s, basis, &cod_index));
    let mut matrix = SparseColumns::new(rows);
    for block in blocks {
        matrix.columns.extend(block?);
    }
    Ok(OracleOutcome::Computed(eliminate(&matrix, rows, opts)))
}

type CodIndex = HashMap<(usize, Vec<usize>), (usize, HashMap<Monomial, usize>)>;

fn wedge_columns(
    md: &MonadDescriptor,
    s: &[usize],
    basis: &SectionBasis,
    cod: &CodIndex,
) -> Result<Vec<Vec<(usize, i64)>>> {
    let mut cols = Vec::with_capacity(basis.len());
    for f in &basis.monomials {
        let mut entries: BTreeMap<usize, i64> = BTreeMap::new();
        for (pos, &t) in s.iter().enumerate() {
            let sign = if pos.is_even() { 1 } else { -1 };
            let rest: Vec<usize> = s.iter().copied().filter(|&u| u != t).collect();
            for (r, p) in md.b_mat.column(t) {
                let Some((offset, idx)) = cod.get(&(r, rest.clone())) else {
                    return Err(Error::Inhomogeneous(format!(
                        "b_mat({r},{t}) times a section lands in a block with no sections"
                    )));
                };
                for (m, c) in p.terms() {
                    let prod = m.mul(f);
                    let i = idx.get(&prod).ok_or_else(|| {
                        Error::Inhomogeneous(format!("b_mat({r},{t}) has the wrong multidegree"))
                    })?;
                    *entries.entry(offset + i).or_insert(0) += sign * int_coeff(c)?;
                }
            }
        }
        cols.push(entries.into_iter().filter(|(_, v)| *v != 0).collect());
    }
    Ok(cols)
}

/// Rank of a polynomial matrix's induced map, for callers outside a monad.
pub fn induced_rank(space: &SpaceSpec, m: &PolyMatrix, domain: &[Twist], codomain: &[Twist]) -> Result<usize> {
    if m.cols() != domain.len() || m.rows() != codomain.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, twists give {}x{}",
            m.rows(),
            m.cols(),
            codomain.len(),
            domain.len()
        )));
    }
    let dom: Vec<SectionBasis> = domain.iter().map(|t| section_basis(space, t)).collect::<Result<_>>()?;
    let cod: Vec<SectionBasis> = codomain.iter().map(|t| section_basis(space, t)).collect::<Result<_>>()?;
    let offsets = prefix_offsets(cod.iter().map(SectionBasis::len));
    let idx: Vec<_> = cod.iter().map(SectionBasis::index).collect();
    let mut sc = SparseColumns::new(offsets[cod.len()]);
    for (c, basis) in dom.iter().enumerate() {
        for f in &basis.monomials {
            let mut entries = BTreeMap::new();
            for (r, p) in m.column(c) {
                for (mono, coeff) in p.terms() {
                    let i = idx[r]
                        .get(&mono.mul(f))
                        .ok_or_else(|| Error::Inhomogeneous(format!("entry ({r},{c}) has the wrong multidegree")))?;
                    *entries.entry(offsets[r] + i).or_insert(0i64) += int_coeff(coeff)?;
                }
            }
            sc.columns.push(entries.into_iter().filter(|(_, v)| *v != 0).collect());
        }
    }
    Ok(rank_sparse(&sc, RankMethod::Exact))
}
