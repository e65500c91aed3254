//! Skew-symmetric sinh-arcsinh distribution with density
//! `(2 / sigma) f0(z; delta) F0(lambda z; delta)`, `z = (x - mu) / sigma`.
//!
//! `delta = 1` gives the skew-normal `2 phi(z) Phi(lambda z)`. There is no closed-form
//! cdf, so [`SsSasParams::cdf`] integrates the density and the quantile inverts that
//! numerically. Sampling uses the sign-flip representation and needs neither.

use std::f64::consts::LN_2;

use crate::error::{check_finite, check_positive, check_probability, Result};
use crate::numerics::{
    expand_bracket, find_root, std_normal_ln_cdf, stream_rng, uniform_open01, Integrator, StreamRng,
};
use crate::sas::{standard_ln_pdf, SymmetricSas};

/// Absolute tolerance of the quadrature behind [`SsSasParams::cdf`].
pub const CDF_TOLERANCE: f64 = 1e-10;

const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsSasParams {
    pub mu: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub delta: f64,
}

impl SsSasParams {
    pub fn new(mu: f64, sigma: f64, lambda: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            mu: check_finite("mu", mu)?,
            sigma: check_positive("sigma", sigma)?,
            lambda: check_finite("lambda", lambda)?,
            delta: check_positive("delta", delta)?,
        })
    }

    pub fn skew_normal(mu: f64, sigma: f64, lambda: f64) -> Result<Self> {
        Self::new(mu, sigma, lambda, 1.0)
    }

    pub fn symmetric(&self) -> SymmetricSas {
        SymmetricSas { delta: self.delta }
    }

    /// Density of the standardised variable.
    fn standard_pdf(&self, z: f64) -> f64 {
        let f0 = self.symmetric();
        2.0 * f0.pdf(z) * f0.cdf(self.lambda * z)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        let skewing = (self.delta * (self.lambda * z).asinh()).sinh();
        LN_2 - self.sigma.ln() + standard_ln_pdf(z, 0.0, self.delta) + std_normal_ln_cdf(skewing)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        if x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        self.standard_cdf((x - self.mu) / self.sigma)
    }

    fn standard_cdf(&self, z: f64) -> Result<f64> {
        let integrator = Integrator::new(CDF_TOLERANCE);
        let g = |t: f64| self.standard_pdf(t);
        let p = if z <= 0.0 {
            integrator.integrate(g, f64::NEG_INFINITY, z)?.value
        } else {
            1.0 - integrator.integrate(g, z, f64::INFINITY)?.value
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// Numerical inverse of [`Self::cdf`]; the bracket grows geometrically from
    /// `mu +/- sigma` until the cdf crosses `u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_probability("u", u)?;
        let mut failure = None;
        let mut objective = |z: f64| match self.standard_cdf(z) {
            Ok(p) => p - u,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        };
        let at_mu = objective(0.0);
        if at_mu == 0.0 {
            return Ok(self.mu);
        }
        let step = if at_mu < 0.0 { 1.0 } else { -1.0 };
        let bracket = expand_bracket(&mut objective, 0.0, step, MAX_DOUBLINGS)?;
        let tol = 1e-12 * bracket.lo.abs().max(bracket.hi.abs()).max(1.0);
        let z = find_root(&mut objective, bracket, tol);
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(self.mu + self.sigma * z?)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.sample_with(&mut stream_rng(seed, 0), n)
    }

    /// Draw `Z ~ f0`, keep it with probability `F0(lambda Z)`, otherwise reflect it.
    pub fn sample_with(&self, rng: &mut StreamRng, n: usize) -> Vec<f64> {
        let f0 = self.symmetric();
        (0..n)
            .map(|_| {
                let z = f0
                    .quantile(uniform_open01(rng))
                    .expect("uniform draw in (0,1)");
                let keep = uniform_open01(rng) <= f0.cdf(self.lambda * z);
                self.mu + self.sigma * if keep { z } else { -z }
            })
            .collect()
    }
}
