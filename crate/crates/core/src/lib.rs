//! Exact construction and certification of monads of line bundles on
//! `X = (P^n1)^2 x ... x (P^ns)^2`.
//!
//! The crate is organised bottom-up:
//!
//! * [`picard`]: the Picard lattice, the truncated intersection ring and
//!   degree/slope arithmetic relative to a polarization.
//! * [`polyalg`]: sparse monomials, polynomials and polynomial matrices, plus
//!   numeric evaluation and exact rank over the rationals and prime fields.
//! * [`monad`]: the banded matrices, monad descriptors and their validators.
//! * [`cohom`]: cohomology of line bundles and line-bundle sums.
//! * [`oracle`]: brute-force global sections and induced maps.
//! * [`certify`]: stability and simplicity certificates.
//!
//! All arithmetic is exact. Data-parallel loops go through [`exec`], which
//! falls back to sequential iteration when the `parallel` feature is off.

pub mod certify;
pub mod cohom;
pub mod error;
pub mod exec;
pub mod monad;
pub mod oracle;
pub mod picard;
pub mod polyalg;

pub use error::{Error, Result};

/// Default prime for randomized rank sampling and the modular fast path.
pub const DEFAULT_PRIME: u64 = 1_000_003;
