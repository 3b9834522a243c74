use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0}")]
    NoConvergence(String),

    #[error("scalar function `{label}` does not vanish at 0 (f(0) = {value})")]
    NotVanishingAtZero { label: String, value: String },

    #[error("odd power requires an odd exponent, got {0}")]
    EvenExponent(u32),

    #[error("generator cannot build the requested pair: {0}")]
    Generator(String),

    #[error("element is not self-adjoint (defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("map is not positive")]
    NotPositive,

    #[error("map is not contractive (norm of weight {norm})")]
    NotContractive { norm: f64 },

    #[error("supporting map is not a TRO homomorphism")]
    NotTroHomomorphism,

    #[error("map is not a triple homomorphism")]
    NotTripleHomomorphism,

    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("closure did not stabilize in {rounds} rounds (dimension {previous} -> {current})")]
    ClosureNotStable {
        rounds: usize,
        previous: usize,
        current: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
