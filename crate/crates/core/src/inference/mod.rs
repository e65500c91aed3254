//! Maximum-likelihood fitting, profile-likelihood intervals and AIC/BIC comparison
//! for the five in-scope families.

mod compare;
mod fit;
mod profile;

pub use compare::{compare_models, Comparison, ComparisonRow};
pub use fit::{fit_ml, starting_values, FitReport};
pub use profile::{profile_interval, relative_profile_likelihood, ProfileInterval, PROFILE_LEVEL};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymmetry::UnimodalDensity;
use crate::error::{check_finite, check_positive, Error, Result};
use crate::numerics::{
    std_normal_cdf, std_normal_ln_pdf, std_normal_quantile, stream_rng, Interval, StreamRng,
};
use crate::sas::{ln_pdf_kernel, SasParams};
use crate::skew_symmetric::SsSasParams;
use crate::two_piece::TpSasParams;

/// Per-observation log-density floor: keeps a single wild point from sending the
/// log-likelihood to `-inf` while still penalising it beyond any finite competitor.
pub const LN_PDF_FLOOR: f64 = -1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    Normal,
    SkewNormal,
    Sas,
    /// Two-piece SAS in the epsilon-skew parameterisation.
    TpSas,
    SsSas,
}

/// How a natural parameter maps to the unconstrained working space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Transform {
    Identity,
    Log,
    Atanh,
}

impl Transform {
    pub(crate) fn forward(self, v: f64) -> f64 {
        match self {
            Transform::Identity => v,
            Transform::Log => v.ln(),
            Transform::Atanh => v.atanh(),
        }
    }

    pub(crate) fn inverse(self, w: f64) -> f64 {
        match self {
            Transform::Identity => w,
            Transform::Log => w.exp(),
            Transform::Atanh => w.tanh(),
        }
    }
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [
        ModelFamily::Normal,
        ModelFamily::SkewNormal,
        ModelFamily::Sas,
        ModelFamily::TpSas,
        ModelFamily::SsSas,
    ];

    pub fn n_params(self) -> usize {
        self.parameter_names().len()
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelFamily::Normal => &["mu", "sigma"],
            ModelFamily::SkewNormal => &["mu", "sigma", "lambda"],
            ModelFamily::Sas => &["mu", "sigma", "epsilon", "delta"],
            ModelFamily::TpSas => &["mu", "sigma", "gamma", "delta"],
            ModelFamily::SsSas => &["mu", "sigma", "lambda", "delta"],
        }
    }

    /// Command-line identifier.
    pub fn id(self) -> &'static str {
        match self {
            ModelFamily::Normal => "normal",
            ModelFamily::SkewNormal => "sn",
            ModelFamily::Sas => "sas",
            ModelFamily::TpSas => "tpsas",
            ModelFamily::SsSas => "sssas",
        }
    }

    /// Label used in printed tables.
    pub fn label(self) -> &'static str {
        match self {
            ModelFamily::Normal => "Normal",
            ModelFamily::SkewNormal => "SN",
            ModelFamily::Sas => "SAS",
            ModelFamily::TpSas => "TP SAS",
            ModelFamily::SsSas => "SS SAS",
        }
    }

    pub(crate) fn transforms(self) -> &'static [Transform] {
        use Transform::*;
        match self {
            ModelFamily::Normal => &[Identity, Log],
            ModelFamily::SkewNormal => &[Identity, Log, Identity],
            ModelFamily::Sas | ModelFamily::SsSas => &[Identity, Log, Identity, Log],
            ModelFamily::TpSas => &[Identity, Log, Atanh, Log],
        }
    }

    /// Fewest observations `fit_ml` accepts.
    pub fn min_observations(self) -> usize {
        match self {
            ModelFamily::Normal => 3,
            _ => self.n_params() + 5,
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "normal" | "n" => Ok(ModelFamily::Normal),
            "sn" | "skewnormal" => Ok(ModelFamily::SkewNormal),
            "sas" => Ok(ModelFamily::Sas),
            "tpsas" | "tp" => Ok(ModelFamily::TpSas),
            "sssas" | "ss" => Ok(ModelFamily::SsSas),
            _ => Err(Error::InvalidInput(format!(
                "unknown model '{s}' (expected normal, sn, sas, tpsas or sssas)"
            ))),
        }
    }
}

/// A model to fit. `n_params` always agrees with `family`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
}

impl ModelSpec {
    pub fn new(family: ModelFamily) -> Self {
        Self { family }
    }

    pub fn n_params(&self) -> usize {
        self.family.n_params()
    }

    pub fn parameter_names(&self) -> &'static [&'static str] {
        self.family.parameter_names()
    }

    /// Builds the distribution at natural parameters `theta`.
    pub fn distribution(&self, theta: &[f64]) -> Result<Distribution> {
        if theta.len() != self.n_params() {
            return Err(Error::InvalidInput(format!(
                "{} takes {} parameters, got {}",
                self.family.label(),
                self.n_params(),
                theta.len()
            )));
        }
        Ok(match self.family {
            ModelFamily::Normal => Distribution::Normal {
                mu: check_finite("mu", theta[0])?,
                sigma: check_positive("sigma", theta[1])?,
            },
            ModelFamily::SkewNormal => {
                Distribution::SkewNormal(SsSasParams::skew_normal(theta[0], theta[1], theta[2])?)
            }
            ModelFamily::Sas => {
                Distribution::Sas(SasParams::new(theta[0], theta[1], theta[2], theta[3])?)
            }
            ModelFamily::TpSas => Distribution::TpSas(TpSasParams::epsilon_skew(
                theta[0], theta[1], theta[2], theta[3],
            )?),
            ModelFamily::SsSas => {
                Distribution::SsSas(SsSasParams::new(theta[0], theta[1], theta[2], theta[3])?)
            }
        })
    }

    pub(crate) fn to_working(&self, theta: &[f64]) -> Vec<f64> {
        self.family
            .transforms()
            .iter()
            .zip(theta)
            .map(|(t, &v)| t.forward(v))
            .collect()
    }

    pub(crate) fn from_working(&self, w: &[f64]) -> Vec<f64> {
        self.family
            .transforms()
            .iter()
            .zip(w)
            .map(|(t, &v)| t.inverse(v))
            .collect()
    }
}

impl From<ModelFamily> for ModelSpec {
    fn from(family: ModelFamily) -> Self {
        Self::new(family)
    }
}

/// A fully specified member of one of the families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Normal { mu: f64, sigma: f64 },
    SkewNormal(SsSasParams),
    Sas(SasParams),
    TpSas(TpSasParams),
    SsSas(SsSasParams),
}

impl Distribution {
    pub fn family(&self) -> ModelFamily {
        match self {
            Distribution::Normal { .. } => ModelFamily::Normal,
            Distribution::SkewNormal(_) => ModelFamily::SkewNormal,
            Distribution::Sas(_) => ModelFamily::Sas,
            Distribution::TpSas(_) => ModelFamily::TpSas,
            Distribution::SsSas(_) => ModelFamily::SsSas,
        }
    }

    /// Natural parameters in the order of `family().parameter_names()`.
    pub fn parameters(&self) -> Vec<f64> {
        match *self {
            Distribution::Normal { mu, sigma } => vec![mu, sigma],
            Distribution::SkewNormal(p) => vec![p.mu, p.sigma, p.lambda],
            Distribution::Sas(p) => vec![p.mu, p.sigma, p.epsilon, p.delta],
            Distribution::TpSas(p) => vec![p.mu, p.sigma(), p.gamma(), p.delta],
            Distribution::SsSas(p) => vec![p.mu, p.sigma, p.lambda, p.delta],
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal { mu, sigma } => std_normal_ln_pdf((x - mu) / sigma) - sigma.ln(),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.ln_pdf(x),
            Distribution::Sas(p) => p.ln_pdf(x),
            Distribution::TpSas(p) => p.ln_pdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        match self {
            Distribution::Normal { mu, sigma } => Ok(std_normal_cdf((x - mu) / sigma)),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.cdf(x),
            Distribution::Sas(p) => Ok(p.cdf(x)),
            Distribution::TpSas(p) => Ok(p.cdf(x)),
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            Distribution::Normal { mu, sigma } => Ok(mu + sigma * std_normal_quantile(u)?),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.quantile(u),
            Distribution::Sas(p) => p.quantile(u),
            Distribution::TpSas(p) => p.quantile(u),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.sample_with(&mut stream_rng(seed, 0), n)
    }

    pub fn sample_with(&self, rng: &mut StreamRng, n: usize) -> Vec<f64> {
        match self {
            Distribution::Normal { mu, sigma } => SasParams {
                mu: *mu,
                sigma: *sigma,
                epsilon: 0.0,
                delta: 1.0,
            }
            .sample_with(rng, n),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.sample_with(rng, n),
            Distribution::Sas(p) => p.sample_with(rng, n),
            Distribution::TpSas(p) => p.sample_with(rng, n),
        }
    }
}

impl UnimodalDensity for Distribution {
    fn pdf(&self, x: f64) -> f64 {
        Distribution::pdf(self, x)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        Distribution::cdf(self, x)
    }

    fn search_interval(&self) -> Interval {
        match self {
            Distribution::Normal { mu, sigma } => SasParams {
                mu: *mu,
                sigma: *sigma,
                epsilon: 0.0,
                delta: 1.0,
            }
            .search_interval(),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.search_interval(),
            Distribution::Sas(p) => p.search_interval(),
            Distribution::TpSas(p) => p.search_interval(),
        }
    }

    fn scan_to_x(&self, t: f64) -> f64 {
        match self {
            Distribution::Normal { mu, sigma } => mu + sigma * t.sinh(),
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.scan_to_x(t),
            Distribution::Sas(p) => p.scan_to_x(t),
            Distribution::TpSas(p) => p.scan_to_x(t),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Distribution::Normal { sigma, .. } => *sigma,
            Distribution::SkewNormal(p) | Distribution::SsSas(p) => p.scale(),
            Distribution::Sas(p) => p.scale(),
            Distribution::TpSas(p) => p.scale(),
        }
    }

    fn known_mode(&self) -> Option<f64> {
        match self {
            Distribution::Normal { mu, .. } => Some(*mu),
            Distribution::TpSas(p) => Some(p.mu),
            _ => None,
        }
    }
}

/// Sum of log-densities, each floored at [`LN_PDF_FLOOR`].
pub fn log_likelihood(model: ModelSpec, theta: &[f64], data: &[f64]) -> Result<f64> {
    let dist = model.distribution(theta)?;
    if data.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            got: 0,
        });
    }
    if let Some(&x) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite observation {x}")));
    }
    Ok(sum_ln_pdf(&dist, data))
}

pub(crate) fn sum_ln_pdf(dist: &Distribution, data: &[f64]) -> f64 {
    let floored = |l: f64| {
        if l.is_nan() {
            LN_PDF_FLOOR
        } else {
            l.max(LN_PDF_FLOOR)
        }
    };
    match dist {
        // The sinh-arcsinh kernels dominate fitting time; hoist their constants.
        Distribution::Sas(p) => {
            let c = p.delta.ln() - p.sigma.ln();
            let inv = p.sigma.recip();
            data.iter()
                .map(|&x| floored(c + ln_pdf_kernel((x - p.mu) * inv, p.epsilon, p.delta)))
                .sum()
        }
        Distribution::TpSas(p) => {
            let (left, right) = (p.left_scale(), p.right_scale());
            let c = p.delta.ln() - (0.5 * (left + right)).ln();
            let (inv_left, inv_right) = (left.recip(), right.recip());
            data.iter()
                .map(|&x| {
                    let d = x - p.mu;
                    let z = d * if d < 0.0 { inv_left } else { inv_right };
                    floored(c + ln_pdf_kernel(z, 0.0, p.delta))
                })
                .sum()
        }
        _ => data.iter().map(|&x| floored(dist.ln_pdf(x))).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_log_likelihood_at_zero() {
        let l = log_likelihood(ModelFamily::Normal.into(), &[0.0, 1.0], &[0.0]).unwrap();
        assert!((l + 0.918_938_533_204_672_7).abs() < 1e-15);
    }

    #[test]
    fn tp_sas_at_zero_gamma_is_symmetric_sas() {
        let data = [-3.0, -0.4, 0.0, 0.2, 1.7, 8.0];
        let tp = log_likelihood(ModelFamily::TpSas.into(), &[0.3, 1.4, 0.0, 0.7], &data).unwrap();
        let sas = log_likelihood(ModelFamily::Sas.into(), &[0.3, 1.4, 0.0, 0.7], &data).unwrap();
        assert_eq!(tp, sas);
    }

    #[test]
    fn out_of_domain_theta_is_rejected() {
        let spec = ModelSpec::new(ModelFamily::TpSas);
        assert!(log_likelihood(spec, &[0.0, 1.0, 1.0, 1.0], &[0.0]).is_err());
        assert!(log_likelihood(spec, &[0.0, -1.0, 0.0, 1.0], &[0.0]).is_err());
        assert!(log_likelihood(spec, &[0.0, 1.0, 0.0], &[0.0]).is_err());
    }

    #[test]
    fn far_outliers_stay_finite() {
        let l = log_likelihood(
            ModelFamily::TpSas.into(),
            &[0.0, 1.0, 0.0, 3.0],
            &[1e300, 0.0],
        )
        .unwrap();
        assert!(l.is_finite());
    }

    #[test]
    fn working_space_round_trips() {
        for family in ModelFamily::ALL {
            let spec = ModelSpec::new(family);
            let theta: Vec<f64> = [0.7, 2.5, 0.3, 1.4][..family.n_params()].to_vec();
            let back = spec.from_working(&spec.to_working(&theta));
            for (a, b) in theta.iter().zip(&back) {
                assert!((a - b).abs() < 1e-14);
            }
            assert_eq!(family.id().parse::<ModelFamily>().unwrap(), family);
        }
    }
}
