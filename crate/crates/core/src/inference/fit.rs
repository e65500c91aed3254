use serde::Serialize;

use super::{sum_ln_pdf, Distribution, ModelFamily, ModelSpec, ProfileInterval, Transform};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, minimize, stream_rng, uniform_open01, OptimizerSettings};

/// Outcome of a maximum-likelihood fit, on the scale of the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: ModelSpec,
    pub parameter_names: Vec<String>,
    pub estimates: Vec<f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    /// One entry per parameter once [`FitReport::with_intervals`] has run; empty before.
    pub intervals: Vec<ProfileInterval>,
    pub converged: bool,
    pub n_obs: usize,
}

impl FitReport {
    pub(crate) fn new(
        model: ModelSpec,
        estimates: Vec<f64>,
        loglik: f64,
        converged: bool,
        n_obs: usize,
    ) -> Self {
        let k = model.n_params() as f64;
        Self {
            model,
            parameter_names: model
                .parameter_names()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            estimates,
            loglik,
            aic: 2.0 * k - 2.0 * loglik,
            bic: k * (n_obs as f64).ln() - 2.0 * loglik,
            intervals: Vec::new(),
            converged,
            n_obs,
        }
    }

    pub fn distribution(&self) -> Result<Distribution> {
        self.model.distribution(&self.estimates)
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.parameter_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.estimates[i])
    }

    /// Adds a profile interval for every parameter.
    pub fn with_intervals(mut self, data: &[f64], settings: &OptimizerSettings) -> Result<Self> {
        let intervals = (0..self.model.n_params())
            .map(|i| super::profile_interval(self.model, data, i, &self, settings))
            .collect::<Result<Vec<_>>>()?;
        self.intervals = intervals;
        Ok(self)
    }
}

/// Robust moment-based start: median, IQR/1.349, the sign of skewness from
/// `median - mean`, unit tail weight and zero for the other shape parameters.
pub fn starting_values(model: ModelSpec, data: &[f64]) -> Vec<f64> {
    let (center, spread) = location_scale(data);
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let skew_sign = if mean < center {
        1.0
    } else if mean > center {
        -1.0
    } else {
        0.0
    };
    match model.family {
        ModelFamily::Normal => vec![center, spread],
        ModelFamily::SkewNormal => vec![center, spread, 0.0],
        ModelFamily::Sas | ModelFamily::SsSas => vec![center, spread, 0.0, 1.0],
        // gamma > 0 widens the left half, i.e. pulls the mean below the median
        ModelFamily::TpSas => vec![center, spread, 0.1 * skew_sign, 1.0],
    }
}

/// Sample median and normal-consistent interquartile spread, falling back to the
/// standard deviation (then to 1) for degenerate data.
fn location_scale(data: &[f64]) -> (f64, f64) {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let (i, frac) = (h.floor() as usize, h - h.floor());
        let next = sorted[(i + 1).min(sorted.len() - 1)];
        sorted[i] + frac * (next - sorted[i])
    };
    let center = q(0.5);
    let mut spread = (q(0.75) - q(0.25)) / 1.349;
    if !(spread > 0.0) {
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        spread = (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / data.len() as f64).sqrt();
    }
    if !(spread > 0.0) || !spread.is_finite() {
        spread = 1.0;
    }
    (center, spread)
}

/// Largest `|ln(value)|` of a positive parameter of the standardised problem. Along
/// light-tailed likelihood ridges sigma and delta can grow without bound; the cap
/// keeps such diverging fits finite.
const LOG_COORDINATE_BOUND: f64 = 50.0;

/// The likelihood problem after standardising the data by its median and spread,
/// which makes the optimiser equivariant under affine changes of the data.
pub(crate) struct Problem {
    pub spec: ModelSpec,
    z: Vec<f64>,
    center: f64,
    spread: f64,
}

impl Problem {
    pub fn new(spec: ModelSpec, data: &[f64]) -> Result<Self> {
        let required = spec.family.min_observations();
        if data.len() < required {
            return Err(Error::InsufficientData {
                required,
                got: data.len(),
            });
        }
        if let Some(&x) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite observation {x}")));
        }
        let (center, spread) = location_scale(data);
        Ok(Self {
            spec,
            z: data.iter().map(|x| (x - center) / spread).collect(),
            center,
            spread,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.z.len()
    }

    /// Natural parameters (data scale) to working coordinates of the standardised problem.
    pub fn to_working(&self, theta: &[f64]) -> Vec<f64> {
        let mut t = theta.to_vec();
        t[0] = (t[0] - self.center) / self.spread;
        t[1] /= self.spread;
        self.spec.to_working(&t)
    }

    pub fn to_natural(&self, w: &[f64]) -> Vec<f64> {
        let mut t = self.spec.from_working(w);
        t[0] = self.center + self.spread * t[0];
        t[1] *= self.spread;
        t
    }

    /// Working value of coordinate `i` to its natural value on the data scale.
    pub fn coordinate_to_natural(&self, i: usize, w: f64) -> f64 {
        let v = self.spec.family.transforms()[i].inverse(w);
        match i {
            0 => self.center + self.spread * v,
            1 => self.spread * v,
            _ => v,
        }
    }

    /// Negative log-likelihood of the data at working point `w`; `+inf` outside the domain.
    pub fn nll(&self, w: &[f64]) -> f64 {
        let transforms = self.spec.family.transforms();
        if w.iter()
            .zip(transforms)
            .any(|(v, t)| *t == Transform::Log && v.abs() > LOG_COORDINATE_BOUND)
        {
            return f64::INFINITY;
        }
        let theta = self.spec.from_working(w);
        match self.spec.distribution(&theta) {
            Ok(d) => self.z.len() as f64 * self.spread.ln() - sum_ln_pdf(&d, &self.z),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Maximum-likelihood fit by multi-start Nelder-Mead in the working space.
///
/// The robust start plus `settings.restarts` uniformly perturbed starts (drawn from
/// `seed`) are each optimised; the best end point wins. A non-converged best run is
/// reported with `converged = false` rather than as an error.
pub fn fit_ml(
    model: ModelSpec,
    data: &[f64],
    settings: &OptimizerSettings,
    seed: u64,
) -> Result<FitReport> {
    settings.validate()?;
    let problem = Problem::new(model, data)?;
    let w0 = problem.to_working(&starting_values(model, data));

    let mut rng = stream_rng(derive_seed(&[seed, model.family as u64]), 1);
    let mut starts = vec![w0.clone()];
    for _ in 0..settings.restarts {
        let w: Vec<f64> = w0
            .iter()
            .map(|v| v + (uniform_open01(&mut rng) - 0.5))
            .collect();
        starts.push(w);
    }

    let mut best: Option<crate::numerics::Minimum> = None;
    for start in &starts {
        if !problem.nll(start).is_finite() {
            continue;
        }
        let m = minimize(|w| problem.nll(w), start, settings)?;
        if best.as_ref().map_or(true, |b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.ok_or_else(|| {
        Error::InvalidInput("log-likelihood is not finite at any starting point".into())
    })?;
    Ok(FitReport::new(
        model,
        problem.to_natural(&best.argmin),
        -best.value,
        best.converged,
        problem.n_obs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{log_likelihood, Distribution};

    #[test]
    fn normal_fit_matches_closed_form() {
        let data = Distribution::Normal {
            mu: 2.0,
            sigma: 3.0,
        }
        .sample(5000, 11);
        let fit = fit_ml(ModelFamily::Normal.into(), &data, &Default::default(), 1).unwrap();
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let sd = (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(fit.converged);
        assert!(
            (fit.estimates[0] - mean).abs() < 1e-5,
            "{:?}",
            fit.estimates
        );
        assert!((fit.estimates[1] - sd).abs() < 1e-5);
        assert!((fit.estimates[0] - 2.0).abs() < 0.17 && (fit.estimates[1] - 3.0).abs() < 0.12);
    }

    #[test]
    fn information_criteria_follow_definitions() {
        let data = Distribution::Normal {
            mu: 0.0,
            sigma: 1.0,
        }
        .sample(200, 3);
        let fit = fit_ml(ModelFamily::TpSas.into(), &data, &Default::default(), 2).unwrap();
        let ll = log_likelihood(fit.model, &fit.estimates, &data).unwrap();
        assert!((ll - fit.loglik).abs() < 1e-8 * ll.abs());
        assert!((fit.aic - (8.0 - 2.0 * fit.loglik)).abs() < 1e-12);
        assert!((fit.aic - fit.bic - (8.0 - 4.0 * 200f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn minimum_sample_sizes() {
        let s = OptimizerSettings::default();
        assert!(fit_ml(ModelFamily::Normal.into(), &[1.0, 2.0, 4.0], &s, 0).is_ok());
        let err = fit_ml(ModelFamily::TpSas.into(), &[1.0, 2.0, 3.0, 4.0, 5.0], &s, 0);
        assert_eq!(
            err.unwrap_err(),
            Error::InsufficientData {
                required: 9,
                got: 5
            }
        );
    }

    #[test]
    fn start_sign_follows_skewness() {
        let left = [-9.0, 0.0, 0.5, 1.0, 1.2];
        assert!(starting_values(ModelFamily::TpSas.into(), &left)[2] > 0.0);
        let right: Vec<f64> = left.iter().map(|x| -x).collect();
        assert!(starting_values(ModelFamily::TpSas.into(), &right)[2] < 0.0);
    }
}
