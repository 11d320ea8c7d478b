//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A truncation point must be strictly positive.
    #[error("invalid truncation point {tau_t} s (must be > 0)")]
    InvalidTruncation { tau_t: f64 },

    /// The profile carries no energy, so the correlation coefficient is 0/0.
    #[error("undefined correlation: power delay profile has zero energy")]
    UndefinedCorrelation,

    /// Information-form fusion needs at least one invertible covariance.
    #[error("degenerate fusion: covariance is singular (|det| < {guard:e})")]
    DegenerateFusion { guard: f64 },

    /// `W*T_B` and `W*T_t` must land on integers.
    #[error("non-integer grid: {name} = {value} deviates from an integer by more than {tol:e} (relative)")]
    NonIntegerGrid {
        name: &'static str,
        value: f64,
        tol: f64,
    },

    /// Quadrature self-check exceeded the requested tolerance.
    #[error("quadrature precision: estimated error {estimated:e} bits exceeds tolerance {tolerance:e} bits")]
    Precision { estimated: f64, tolerance: f64 },

    /// Malformed tabulated-profile CSV.
    #[error("profile csv (line {line}): {reason}")]
    ProfileCsv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
