//! Numerical kernels shared by every distribution and fitting routine.

mod normal;
mod quadrature;
mod rng;
mod roots;
mod simplex;

pub use normal::{
    std_normal_cdf, std_normal_ln_cdf, std_normal_ln_pdf, std_normal_pdf, std_normal_quantile,
};
pub use quadrature::{integrate, Integrator, Quadrature};
pub use rng::{derive_seed, stream_rng, uniform_open01, StreamRng};
pub use roots::{expand_bracket, find_root};
pub use simplex::{minimize, Minimum, OptimizerSettings};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInput(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `x` rounded to `digits` significant decimal digits (finite values only change).
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}
