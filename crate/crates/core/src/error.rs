use thiserror::Error;

/// Errors raised by construction, validation, and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("effect {label:?} is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { label: String, deviation: f64 },

    #[error("effect {label:?} is not bounded by [O, I] (eigenvalues in [{min_eigenvalue:e}, {max_eigenvalue:e}])")]
    NotPositive {
        label: String,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("effects do not sum to the identity (max deviation {deviation:e})")]
    NotComplete { deviation: f64 },

    #[error("probability of outcome {label:?} is negative ({value:e})")]
    NegativeProbability { label: String, value: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, got: impl ToString) -> Self {
        Error::Shape {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
