use thiserror::Error;

/// Errors raised by the library. Every precondition failure carries the
/// measured quantity that violated it so callers can report it verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("regular radius search exhausted {candidates} candidates in ({lo}, {hi})")]
    SearchExhausted { lo: f64, hi: f64, candidates: usize },

    #[error("Bohr set is not regular (radius {eps}, kappa {kappa})")]
    NotRegular { eps: f64, kappa: f64 },

    #[error("not an attendant: {0}")]
    NotAttendant(String),

    #[error("set is rectilinearly uniform: box-norm ratio {ratio} < alpha {alpha}")]
    Uniform { ratio: f64, alpha: f64 },

    #[error("Fourier bias {bias} below required {required}")]
    BiasTooSmall { bias: f64, required: f64 },

    #[error("increment witness not found at the configured constants: {0}")]
    ConstantsInfeasible(String),

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("set contains a 3-term progression {0:?}")]
    NotProgressionFree([i64; 3]),

    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
