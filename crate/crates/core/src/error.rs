use thiserror::Error;

/// Errors produced by the estimation, risk and lower-bound routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample count n = {0} must be odd and at least 3")]
    InvalidSampleCount(usize),

    #[error("basis index must be at least 1, got {0}")]
    InvalidBasisIndex(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight grid for n = {n} has {size} entries, above the cap of {cap}")]
    GridTooLarge { n: usize, size: usize, cap: usize },

    #[error("n = {n} is too small: l_n = {l_n} leaves no high-frequency coefficients")]
    TooFewCoefficients { n: usize, l_n: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error(
        "water-filling budget R = {budget} is infeasible; the minimal feasible R is {minimal}"
    )]
    InfeasibleBudget { budget: f64, minimal: f64 },

    #[error("prior design has M_n = {blocks} < 1 (h_n = {bandwidth})")]
    EmptyDesign { blocks: i64, bandwidth: f64 },

    #[error("estimator failed on replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
