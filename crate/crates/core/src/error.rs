use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree {degree} exceeds the supported maximum {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },

    #[error("recurrence produced a non-finite value at degree {degree} (x = {x})")]
    NonFinite { degree: usize, x: f64 },

    #[error("sequence has no exact rational coefficients")]
    NotExact,

    #[error("x = {x} is outside the domain of {what}")]
    OutOfDomain { x: f64, what: &'static str },

    #[error("x = {x} is not a mass point: {reason}")]
    NotAMassPoint { x: f64, reason: &'static str },

    #[error("integrity failure: {0}")]
    Integrity(String),

    #[error("mass point candidate x = {x} is too close to +-1: confirming it needs a {needed}-truncation, above the cap {cap}")]
    UnresolvedMassPoint { x: f64, needed: usize, cap: usize },

    #[error("quadrature did not converge (last change {change:e} with {panels} panels)")]
    QuadratureNotConverged { change: f64, panels: usize },

    #[error("polynomial division is not exact")]
    NonExactDivision,

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("unsupported base family: {0}")]
    UnsupportedBase(String),
}
