use thiserror::Error;

/// Errors raised by the numeric models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    /// Any other numerical failure (non-physical state, no bracket, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The requested combination of options is not supported.
    #[error("unsupported mode: {0}")]
    Unsupported(String),
    /// A time outside the visible part of a pass.
    #[error("outside pass: {0}")]
    OutOfPass(String),
    /// Geometry for which the fading parametrisation breaks down.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    /// Uplink beam in the strong-turbulence regime (Yura parameter ≥ 1).
    #[error("strong turbulence: {0}")]
    StrongTurbulence(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Unsupported(_) | Error::OutOfPass(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
