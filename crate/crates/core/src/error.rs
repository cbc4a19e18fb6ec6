use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adaptive integrator ran out of subdivisions before meeting its
    /// tolerance. The best estimate so far is kept so callers can decide
    /// whether it is usable.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         estimate {estimate:e}, error bound {error_bound:e}"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("cross-section line at tau = {tau} does not intersect the grid domain")]
    Domain { tau: f64 },

    #[error("extremum at index {index} lies on the section boundary; enlarge the grid")]
    Boundary { index: usize },

    #[error(
        "no peak: max |amplitude| {max_amplitude:e} is below 10% of the reference peak \
         {reference_peak:e}"
    )]
    NoPeak {
        max_amplitude: f64,
        reference_peak: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
