use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Some `γᵢβᵢ` (or a general band product `subᵢ·superᵢ`) is not strictly positive.
    #[error("inadmissible coefficients: {0}")]
    Inadmissible(String),

    #[error("{value} is not an eigenvalue (relative residual {residual:e})")]
    NotAnEigenvalue { value: f64, residual: f64 },

    #[error("{method} did not converge after {iterations} iterations")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
    },

    #[error("point lies on the curve (distance {distance:e})")]
    PointOnCurve { distance: f64 },

    #[error("insufficient sampling: argument increment {increment:.3} rad exceeds pi/2")]
    InsufficientSampling { increment: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
