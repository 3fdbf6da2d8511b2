use alloc::string::String;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point cannot be projected onto the manifold: {0}")]
    NotProjectable(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular configuration between bodies {i} and {j}")]
    SingularConfiguration { i: usize, j: usize },

    #[error("step size {step:e} fell below the minimum at t = {t}")]
    StepUnderflow { t: f64, step: f64 },

    #[error("initial data is off the manifold: {0}")]
    OffManifold(String),

    #[error("degenerate size: {0}")]
    DegenerateSize(String),

    #[error("singular pair ({i}, {j}) in criterion sums")]
    SingularPair { i: usize, j: usize },

    #[error("argument outside the kernel domain: {0}")]
    DomainError(String),

    #[error("trajectory carries no hyperbolic ansatz")]
    NotHyperbolicClass,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
