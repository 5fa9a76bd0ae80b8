use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("Matsubara series did not reach tolerance: estimate {estimate:e}, residual bound {bound:e} after {terms} terms")]
    SeriesNonConvergence {
        estimate: f64,
        bound: f64,
        terms: u64,
    },

    #[error("pole at {pole} coincides with the sharp cutoff {omega_d}")]
    PoleOnCutoff { pole: f64, omega_d: f64 },

    #[error("degenerate baths: all rates vanish at transition {transition}")]
    DegenerateBath { transition: usize },

    #[error("Liouvillian kernel has dimension {dim} (expected 1)")]
    DegenerateSteadyState { dim: usize },

    #[error("time step {dt} too large: dt * ||L|| = {product:.3} (limit 0.1)")]
    StepTooLarge { dt: f64, product: f64 },

    #[error("second-law margin violated: omega_{transition} + delta_{transition} = {margin:e} (omega = {omega}, delta = {delta:e})")]
    SecondLawViolation {
        transition: usize,
        omega: f64,
        delta: f64,
        margin: f64,
    },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}
