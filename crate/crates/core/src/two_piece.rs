//! Two-piece sinh-arcsinh distribution.
//!
//! Two halves of the symmetric density `f0(.; delta)` are joined at the mode `mu`:
//! scale `sigma * b(gamma)` to the left and `sigma * a(gamma)` to the right, with common
//! normaliser `2 / (sigma * (a + b))`. Both tails share the same decay rate; only the
//! body is asymmetric.

use crate::error::{check_finite, check_positive, check_probability, Error, Result};
use crate::numerics::{stream_rng, uniform_open01, Integrator, StreamRng};
use crate::sas::{standard_ln_pdf, SymmetricSas};

/// Choice of `{a(gamma), b(gamma)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameterisation {
    /// `a = 1 - gamma`, `b = 1 + gamma`, `gamma` in (-1, 1).
    EpsilonSkew,
    /// `a = 1 / gamma`, `b = gamma`, `gamma > 0`.
    InverseScaleFactors,
    /// Left and right scales given directly. `sigma()` and `gamma()` report the
    /// epsilon-skew values `sigma = (s1 + s2) / 2`, `gamma = (s1 - s2) / (s1 + s2)`.
    TwoSigma,
}

/// Two-piece SAS parameters.
///
/// Stored canonically as the left/right scales, so conversions between
/// parameterisations never change the distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpSasParams {
    pub mu: f64,
    left_scale: f64,
    right_scale: f64,
    pub delta: f64,
    parameterisation: Parameterisation,
}

impl TpSasParams {
    pub fn new(
        mu: f64,
        sigma: f64,
        gamma: f64,
        delta: f64,
        parameterisation: Parameterisation,
    ) -> Result<Self> {
        check_finite("mu", mu)?;
        check_positive("sigma", sigma)?;
        check_positive("delta", delta)?;
        let (a, b) = match parameterisation {
            Parameterisation::EpsilonSkew | Parameterisation::TwoSigma => {
                if !(gamma > -1.0 && gamma < 1.0) {
                    return Err(Error::Domain {
                        name: "gamma",
                        value: gamma,
                        constraint: "epsilon-skew gamma must lie in (-1, 1)",
                    });
                }
                (1.0 - gamma, 1.0 + gamma)
            }
            Parameterisation::InverseScaleFactors => {
                check_positive("gamma", gamma)?;
                (1.0 / gamma, gamma)
            }
        };
        Ok(Self {
            mu,
            left_scale: sigma * b,
            right_scale: sigma * a,
            delta,
            parameterisation,
        })
    }

    pub fn epsilon_skew(mu: f64, sigma: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::new(mu, sigma, gamma, delta, Parameterisation::EpsilonSkew)
    }

    pub fn inverse_scale_factors(mu: f64, sigma: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::new(
            mu,
            sigma,
            gamma,
            delta,
            Parameterisation::InverseScaleFactors,
        )
    }

    /// Scales `sigma1` (left of the mode) and `sigma2` (right of the mode).
    pub fn two_sigma(mu: f64, sigma1: f64, sigma2: f64, delta: f64) -> Result<Self> {
        check_finite("mu", mu)?;
        check_positive("delta", delta)?;
        Ok(Self {
            mu,
            left_scale: check_positive("sigma1", sigma1)?,
            right_scale: check_positive("sigma2", sigma2)?,
            delta,
            parameterisation: Parameterisation::TwoSigma,
        })
    }

    pub fn parameterisation(&self) -> Parameterisation {
        self.parameterisation
    }

    pub fn left_scale(&self) -> f64 {
        self.left_scale
    }

    pub fn right_scale(&self) -> f64 {
        self.right_scale
    }

    pub fn sigma(&self) -> f64 {
        match self.parameterisation {
            Parameterisation::EpsilonSkew | Parameterisation::TwoSigma => {
                0.5 * (self.left_scale + self.right_scale)
            }
            Parameterisation::InverseScaleFactors => (self.left_scale * self.right_scale).sqrt(),
        }
    }

    pub fn gamma(&self) -> f64 {
        let (l, r) = (self.left_scale, self.right_scale);
        match self.parameterisation {
            Parameterisation::EpsilonSkew | Parameterisation::TwoSigma => (l - r) / (l + r),
            Parameterisation::InverseScaleFactors => (l / r).sqrt(),
        }
    }

    /// `(a(gamma), b(gamma))` under the current parameterisation.
    pub fn scale_factors(&self) -> (f64, f64) {
        let sigma = self.sigma();
        (self.right_scale / sigma, self.left_scale / sigma)
    }

    /// Same distribution expressed in another parameterisation.
    pub fn reparameterise(&self, target: Parameterisation) -> Self {
        Self {
            parameterisation: target,
            ..*self
        }
    }

    pub fn symmetric(&self) -> SymmetricSas {
        SymmetricSas { delta: self.delta }
    }

    /// `P(X < mu) = b / (a + b)`.
    pub fn mass_below_mode(&self) -> f64 {
        self.left_scale / (self.left_scale + self.right_scale)
    }

    fn side_scale(&self, x: f64) -> f64 {
        if x < self.mu {
            self.left_scale
        } else {
            self.right_scale
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let s = self.side_scale(x);
        let z = (x - self.mu) / s;
        (2.0 / (self.left_scale + self.right_scale)).ln() + standard_ln_pdf(z, 0.0, self.delta)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let total = self.left_scale + self.right_scale;
        let f0 = self.symmetric();
        if x < self.mu {
            2.0 * self.left_scale / total * f0.cdf((x - self.mu) / self.left_scale)
        } else if x == self.mu {
            self.mass_below_mode()
        } else {
            1.0 - 2.0 * self.right_scale / total * f0.cdf((self.mu - x) / self.right_scale)
        }
    }

    /// Branch-wise inversion through the symmetric SAS quantile.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_probability("u", u)?;
        let total = self.left_scale + self.right_scale;
        let f0 = self.symmetric();
        if u < self.mass_below_mode() {
            let v = (u * total / (2.0 * self.left_scale)).min(0.5);
            Ok(self.mu + self.left_scale * f0.quantile(v)?)
        } else {
            let v = ((1.0 - u) * total / (2.0 * self.right_scale)).min(0.5);
            Ok(self.mu - self.right_scale * f0.quantile(v)?)
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.sample_with(&mut stream_rng(seed, 0), n)
    }

    pub fn sample_with(&self, rng: &mut StreamRng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                self.quantile(uniform_open01(rng))
                    .expect("uniform draw in (0,1)")
            })
            .collect()
    }

    /// Raw moment `E[X^k]` by quadrature over each half.
    ///
    /// Absolute tolerance 1e-8, relaxed to 1e-12 relative for moments too large
    /// for an absolute target to be representable.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidInput("moment order must be >= 1".into()));
        }
        let total = self.left_scale + self.right_scale;
        let f0 = self.symmetric();
        let integrator = Integrator {
            rel_tol: 1e-12,
            ..Integrator::new(0.5e-8)
        };
        let half = |scale: f64, lo: f64, hi: f64| {
            let weight = 2.0 * scale / total;
            integrator.integrate(
                |z| {
                    let density = f0.pdf(z);
                    if density == 0.0 {
                        0.0
                    } else {
                        weight * (self.mu + scale * z).powi(k as i32) * density
                    }
                },
                lo,
                hi,
            )
        };
        let left = half(self.left_scale, f64::NEG_INFINITY, 0.0)?;
        let right = half(self.right_scale, 0.0, f64::INFINITY)?;
        Ok(left.value + right.value)
    }
}
