use thiserror::Error;

/// Errors raised across the library.
///
/// Most of these signal either bad user input (`Parse`, `InvalidField`,
/// `InvalidLevel`) or a failed internal consistency check that would
/// indicate a bug (`NonRational`, `NonIntegral`, `NotEquivariant`).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("leading coefficient undetermined at the available precision")]
    IndeterminatePrecision,
    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("no stabilization: {0}")]
    NoStabilization(String),
    #[error("reduction did not terminate: {0}")]
    NonTermination(String),
    #[error("character sum is not rational: {0}")]
    NonRational(String),
    #[error("value is not integral: {0}")]
    NonIntegral(String),
    #[error("operator does not descend to the quotient: {0}")]
    NotEquivariant(String),
    #[error("not a sublattice: {0}")]
    NotSublattice(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
