//! Error type shared across the solver crate.

use thiserror::Error;

/// Errors surfaced by matrix construction, projection factorization,
/// the basic procedures, the main algorithms and instance I/O.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("input contains a non-finite entry")]
    NonFiniteInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("every projection column is zero")]
    ZeroColumns,

    #[error("coordinate {index} is zero within tolerance; bound undefined")]
    ZeroCoordinate { index: usize },

    #[error("cut set is empty: numerical breakdown in the basic procedure")]
    EmptyCut,

    #[error("iteration limit {limit} exceeded: numerical breakdown guard")]
    IterationLimitExceeded { limit: usize },

    #[error("update direction is degenerate (iterate equals the chosen column)")]
    DegenerateDirection,

    #[error("column {index} is zero; step undefined")]
    ZeroColumn { index: usize },

    #[error("rescaling stalled: cut contains no active column")]
    RescalingStalled,

    #[error("certificate failed verification: {details}")]
    VerificationFailed { details: String },

    #[error("instance too large for the exact oracle ({details})")]
    InstanceTooLarge { details: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
