//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("asymmetric entry ({i},{j}): |a_ij - a_ji| = {delta:e}")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("non-finite entry at ({0},{1})")]
    NonFinite(usize, usize),

    #[error("dimension d={d} out of range for n={n}")]
    DimOutOfRange { d: usize, n: usize },

    #[error("eigensolver failed to converge within {0} iterations")]
    NoConvergence(usize),

    #[error("kept eigenvalue {index} is negative beyond tolerance: {value:e}")]
    KeptEigenvalueNegative { index: usize, value: f64 },

    #[error("rho estimate for network {0} is zero; weights undefined")]
    ZeroRho(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
