use thiserror::Error;

/// Errors produced by the exact-arithmetic, series and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("missing variable in assignment: {0}")]
    MissingVariable(String),
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("leading coefficient of the series is zero")]
    ZeroLeadingCoefficient,
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("sequence is not mean-normalized (a0 must be 1)")]
    NotNormalized,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("insufficient order: {0}")]
    InsufficientOrder(String),
    #[error("coefficient is symbolic: {0}")]
    SymbolicCoefficient(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("unsupported limit case: {0}")]
    UnsupportedLimitCase(String),
    #[error("interpolation degree bound exceeded: {0}")]
    DegreeBoundExceeded(String),
    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),
    #[error("order too low: {0}")]
    OrderTooLow(String),
    #[error("gauss iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("verdict undecidable, first nonzero coefficient is symbolic: {0}")]
    SymbolicUndecidable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
