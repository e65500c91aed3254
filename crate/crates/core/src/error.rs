use thiserror::Error;

/// Errors produced by the distribution, fitting and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({constraint})")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error(
        "quadrature did not converge: estimate {value} with error {error} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("[{lo}, {hi}] does not bracket a sign change")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change found after {doublings} bracket doublings")]
    BracketGrowth { doublings: usize },

    #[error("density has {count} local maxima on the scan grid")]
    Multimodal { count: usize },

    #[error("need at least {required} observations, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint: "must be finite",
        })
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint: "must lie in (0, 1)",
        })
    }
}
