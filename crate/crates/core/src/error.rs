use thiserror::Error;

/// Errors produced by the library.
///
/// Indices stored in variants are 0-based; the `Display` text reports them
/// 1-based, which is what users see on the command line and in files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("matrix is asymmetric at ({}, {}): |J_ij - J_ji| = {delta:e}", .i + 1, .j + 1)]
    AsymmetricEntry { i: usize, j: usize, delta: f64 },

    #[error("matrix has nonzero diagonal entry at ({pos}, {pos})", pos = .0 + 1)]
    NonzeroDiagonal(usize),

    #[error("matrix entry at ({}, {}) is not finite", .i + 1, .j + 1)]
    NonFiniteEntry { i: usize, j: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("spin value {value} at position {} is not +1 or -1", .index + 1)]
    InvalidSpin { index: usize, value: i64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {} out of range 1..={len}", .index + 1)]
    IndexOutOfRange { index: usize, len: usize },

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("coupling matrix does not match the group layout: {0}")]
    SpecMismatch(String),

    #[error("{n} is not divisible by domain size {k}")]
    NotDivisible { n: usize, k: usize },

    #[error("no convergence within {0} sweeps")]
    NoConvergence(usize),

    #[error("instance too large for exhaustive enumeration: {0} units (limit {limit})", limit = crate::oracle::MAX_ENUMERATION)]
    TooLarge(usize),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
