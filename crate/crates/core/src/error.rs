use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers and their I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution must be ≥ 2 (got {0})")]
    InvalidResolution(usize),

    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field contains a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("linear solver hit its iteration limit ({iterations} iterations, residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("degenerate search direction: step-size denominator is {denominator:.3e}")]
    DegenerateDirection { denominator: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("invalid value for key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
