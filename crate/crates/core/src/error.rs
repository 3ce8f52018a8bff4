use thiserror::Error;

use crate::sim::Primitive;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid Pauli symbol {0} (expected 0..=3)")]
    InvalidPauliSymbol(u8),
    #[error("invalid Pauli string: {0}")]
    InvalidPauliString(String),
    #[error("measurement basis string contains the identity at site {0}")]
    IdentityInBasis(usize),
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },
    #[error("{what}: n = {n} exceeds the configured cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("map is not completely positive and trace preserving: {0}")]
    NotCptp(String),
    #[error("function is not ±1-valued")]
    NotBoolean,
    #[error("function is not bounded by 1 (sup norm {0})")]
    Unbounded(f64),
    #[error("degree {found} exceeds the declared bound {bound}")]
    DegreeExceeded { found: usize, bound: usize },
    #[error("shot budget exceeded for {primitive:?}: requested {requested}, remaining {remaining}")]
    BudgetExceeded {
        primitive: Primitive,
        requested: u128,
        remaining: u128,
    },
    #[error("primitive {primitive:?} is not available for a {target} target")]
    WrongTarget {
        primitive: Primitive,
        target: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
