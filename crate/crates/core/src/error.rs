use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("twist has length {got}, expected {expected}")]
    TwistLength { expected: usize, got: usize },
    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("normalization window violated: degree {degree} not in [{low}, 0]")]
    NormalizationWindow { degree: String, low: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable {0} is not assigned")]
    UnassignedVariable(String),
    #[error("zero polynomial has no multidegree")]
    ZeroPolynomial,
    #[error("denominator not invertible modulo {0}")]
    NotInvertible(u64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("descriptor is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
