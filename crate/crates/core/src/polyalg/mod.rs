//! Sparse polynomial algebra in the variable groups `x^{(i)}_j, y^{(i)}_j`.
//!
//! Variable `x^{(i)}_j` carries degree one in slot `(i,1)`, `y^{(i)}_j` in
//! slot `(i,2)`. Canonical order is lexicographic on `(group, family, index)`.

mod matrix;
mod numeric;
mod poly;

pub use matrix::PolyMatrix;
pub use numeric::{
    evaluate, numeric_rank, rank_sparse, Assignment, Field, NumericMatrix, RankMethod, SparseColumns,
};
pub use poly::{Homogeneity, Monomial, Poly};

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    X,
    Y,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::X => 'x',
            Family::Y => 'y',
        }
    }
}

/// A coordinate `x^{(group)}_{index}` or `y^{(group)}_{index}`; `group` is
/// 1-based, `index` runs over `0..=n_group`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub group: u32,
    pub family: Family,
    pub index: u32,
}

impl Var {
    pub fn x(group: u32, index: u32) -> Self {
        Self {
            group,
            family: Family::X,
            index,
        }
    }

    pub fn y(group: u32, index: u32) -> Self {
        Self {
            group,
            family: Family::Y,
            index,
        }
    }

    /// Picard slot this variable is a section of.
    pub fn slot(&self) -> usize {
        let base = 2 * (self.group as usize - 1);
        match self.family {
            Family::X => base,
            Family::Y => base + 1,
        }
    }

    /// Parses the dump spelling `x1_0`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        let family = match chars.next()? {
            'x' => Family::X,
            'y' => Family::Y,
            _ => return None,
        };
        let (g, i) = chars.as_str().split_once('_')?;
        let group: u32 = g.parse().ok()?;
        let index: u32 = i.parse().ok()?;
        if group == 0 {
            return None;
        }
        Some(Self {
            group,
            family,
            index,
        })
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}_{}", self.family.letter(), self.group, self.index)
    }
}
