use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("{field} out of range: {message}")]
    Range { field: &'static str, message: String },

    /// A function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the acceptance tolerance.
    #[error("quadrature did not converge: error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    Convergence {
        error_estimate: f64,
        subdivisions: usize,
    },

    /// The truncation level is too coarse for the small-jump Gaussian substitution.
    #[error("truncation too coarse: sqrt(sigma2)/delta = {ratio:.3} is below the floor {floor:.3}")]
    Accuracy { ratio: f64, floor: f64 },

    /// A time grid was not sorted or contained negative times.
    #[error("time grid error: {0}")]
    Order(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn range(field: &'static str, message: impl Into<String>) -> Self {
        Error::Range {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
