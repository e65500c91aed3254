//! Sinh-arcsinh distribution: `X = mu + sigma * sinh((asinh(Z) + epsilon) / delta)` for
//! standard normal `Z`, i.e. `F(x) = Phi(H(x))` with
//! `H(x) = sinh(delta * asinh((x - mu) / sigma) - epsilon)`.

use std::f64::consts::LN_2;

use crate::error::{check_finite, check_positive, Result};
use crate::numerics::{
    std_normal_cdf, std_normal_ln_pdf, std_normal_quantile, stream_rng, uniform_open01, StreamRng,
};

/// Location, scale, skewness and tail-weight of a sinh-arcsinh distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SasParams {
    pub mu: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub delta: f64,
}

/// The symmetric member `f0(z; delta) = s0(z; 0, 1, 0, delta)` and its cdf `F0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricSas {
    pub delta: f64,
}

/// Log-density of the standardised variable `z = (x - mu) / sigma`.
#[inline]
pub(crate) fn standard_ln_pdf(z: f64, epsilon: f64, delta: f64) -> f64 {
    delta.ln() + ln_pdf_kernel(z, epsilon, delta)
}

/// `standard_ln_pdf` without its constant `ln delta` term, for likelihood loops
/// that hoist it.
///
/// `asinh(z)` and `ln sqrt(1 + z^2)` share one square root, and `sinh(a)` and
/// `ln cosh(a)` share one exponential.
#[inline]
pub(crate) fn ln_pdf_kernel(z: f64, epsilon: f64, delta: f64) -> f64 {
    let abs_z = z.abs();
    let (asinh, ln_hypot) = if abs_z < 1e150 {
        let z2 = z * z;
        let root = (z2 + 1.0).sqrt();
        ((abs_z + z2 / (1.0 + root)).ln_1p(), 0.5 * z2.ln_1p())
    } else {
        let ln_z = abs_z.ln();
        (ln_z + LN_2, ln_z)
    };
    let a = delta * asinh.copysign(z) - epsilon;
    let abs_a = a.abs();
    let grow = abs_a.exp();
    let shrink = grow.recip();
    let sinh = 0.5 * (grow - shrink);
    let ln_cosh = abs_a + (shrink * shrink).ln_1p() - LN_2;
    std_normal_ln_pdf(sinh) + ln_cosh - ln_hypot
}

impl SasParams {
    pub fn new(mu: f64, sigma: f64, epsilon: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            mu: check_finite("mu", mu)?,
            sigma: check_positive("sigma", sigma)?,
            epsilon: check_finite("epsilon", epsilon)?,
            delta: check_positive("delta", delta)?,
        })
    }

    /// `N(mu, sigma^2)` as the `(epsilon, delta) = (0, 1)` member.
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(mu, sigma, 0.0, 1.0)
    }

    /// `H(x) = sinh(delta * asinh((x - mu) / sigma) - epsilon)`; strictly increasing in `x`.
    pub fn transform(&self, x: f64) -> f64 {
        (self.delta * ((x - self.mu) / self.sigma).asinh() - self.epsilon).sinh()
    }

    /// `ln phi(H) + ln h`, evaluated without forming `cosh` or `phi` directly.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        standard_ln_pdf((x - self.mu) / self.sigma, self.epsilon, self.delta) - self.sigma.ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        std_normal_cdf(self.transform(x))
    }

    /// Closed-form inverse `mu + sigma * sinh((asinh(Phi^-1(u)) + epsilon) / delta)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        let z = std_normal_quantile(u)?;
        Ok(self.mu + self.sigma * ((z.asinh() + self.epsilon) / self.delta).sinh())
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with(&self, rng: &mut StreamRng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let z = std_normal_quantile(uniform_open01(rng)).expect("uniform draw in (0,1)");
                self.mu + self.sigma * ((z.asinh() + self.epsilon) / self.delta).sinh()
            })
            .collect()
    }
}

impl SymmetricSas {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            delta: check_positive("delta", delta)?,
        })
    }

    pub fn ln_pdf(&self, z: f64) -> f64 {
        standard_ln_pdf(z, 0.0, self.delta)
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.ln_pdf(z).exp()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return if z > 0.0 { 1.0 } else { 0.0 };
        }
        std_normal_cdf((self.delta * z.asinh()).sinh())
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        Ok((std_normal_quantile(u)?.asinh() / self.delta).sinh())
    }

    pub fn as_sas(&self) -> SasParams {
        SasParams {
            mu: 0.0,
            sigma: 1.0,
            epsilon: 0.0,
            delta: self.delta,
        }
    }
}
