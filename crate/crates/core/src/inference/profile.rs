use serde::Serialize;

use super::fit::Problem;
use super::{FitReport, ModelSpec, Transform};
use crate::error::{Error, Result};
use crate::numerics::{find_root, minimize, Interval, OptimizerSettings};

/// Relative-likelihood cut-off of the profile intervals (roughly a 95% level).
pub const PROFILE_LEVEL: f64 = 0.147;

/// Working-space root tolerance for the interval end points.
const ENDPOINT_TOLERANCE: f64 = 1e-5;
const FIRST_STEP: f64 = 0.1;

/// `{theta_i : max_{others} L(theta) / L(theta_hat) >= PROFILE_LEVEL}`.
///
/// An end point flagged open is where the search stopped at its domain cap
/// without the relative likelihood falling below the cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl ProfileInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Largest working-space excursion from the estimate before an end point is declared open.
fn search_cap(t: Transform) -> f64 {
    match t {
        // the data are standardised, so this is a thousand spreads
        Transform::Identity => 1e3,
        // a factor of e^12 in a scale or tail parameter
        Transform::Log => 12.0,
        // |gamma| = tanh(15) is within 1e-12 of the boundary
        Transform::Atanh => 15.0,
    }
}

struct Profiler {
    problem: Problem,
    index: usize,
    w_hat: Vec<f64>,
    loglik_hat: f64,
    /// Settings for the warm-started nuisance fits: a smaller first simplex, since
    /// the optimum moves little between neighbouring trial values.
    nuisance_settings: OptimizerSettings,
}

impl Profiler {
    fn new(
        model: ModelSpec,
        data: &[f64],
        index: usize,
        fit: &FitReport,
        settings: &OptimizerSettings,
    ) -> Result<Self> {
        if index >= model.n_params() {
            return Err(Error::InvalidInput(format!(
                "parameter index {index} out of range for {}",
                model.family.label()
            )));
        }
        if fit.model != model {
            return Err(Error::InvalidInput(
                "fit belongs to a different model".into(),
            ));
        }
        settings.validate()?;
        let problem = Problem::new(model, data)?;
        let mut w_hat = problem.to_working(&fit.estimates);
        // Polish the optimum so the reference likelihood really is the maximum.
        let polished = minimize(|w| problem.nll(w), &w_hat, settings)?;
        let loglik_hat = if -polished.value > fit.loglik {
            w_hat = polished.argmin;
            -polished.value
        } else {
            fit.loglik
        };
        Ok(Self {
            problem,
            index,
            w_hat,
            loglik_hat,
            nuisance_settings: OptimizerSettings {
                initial_step: settings.initial_step.min(0.05),
                ..*settings
            },
        })
    }

    fn full(&self, fixed: f64, nuisance: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(nuisance.len() + 1);
        w.extend_from_slice(&nuisance[..self.index]);
        w.push(fixed);
        w.extend_from_slice(&nuisance[self.index..]);
        w
    }

    fn nuisance_hat(&self) -> Vec<f64> {
        let mut n = self.w_hat.clone();
        n.remove(self.index);
        n
    }

    /// Profile log-likelihood at working value `fixed`, warm-started from `warm`
    /// (which is updated to the new nuisance optimum).
    fn profile(&self, fixed: f64, warm: &mut Vec<f64>) -> f64 {
        let objective = |nu: &[f64]| self.problem.nll(&self.full(fixed, nu));
        let mut start = warm.clone();
        if !objective(&start).is_finite() {
            start = self.nuisance_hat();
            if !objective(&start).is_finite() {
                return f64::NEG_INFINITY;
            }
        }
        match minimize(objective, &start, &self.nuisance_settings) {
            Ok(m) => {
                *warm = m.argmin;
                -m.value
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// `ln R(fixed) - ln PROFILE_LEVEL`; positive inside the interval.
    fn excess(&self, fixed: f64, warm: &mut Vec<f64>) -> f64 {
        self.profile(fixed, warm) - self.loglik_hat - PROFILE_LEVEL.ln()
    }

    /// Working-space end point in direction `dir` (±1) and whether it is open.
    fn endpoint(&self, dir: f64) -> Result<(f64, bool)> {
        let start = self.w_hat[self.index];
        let transform = self.problem.spec.family.transforms()[self.index];
        let cap = search_cap(transform);
        let limit = match transform {
            Transform::Atanh => dir * cap,
            _ => start + dir * cap,
        };
        let mut warm = self.nuisance_hat();
        let mut inner = start;
        let mut step = FIRST_STEP;
        loop {
            let mut trial = inner + dir * step;
            let capped = (trial - limit) * dir >= 0.0;
            if capped {
                trial = limit;
            }
            let mut trial_warm = warm.clone();
            if self.excess(trial, &mut trial_warm) < 0.0 {
                let (lo, hi) = if dir > 0.0 {
                    (inner, trial)
                } else {
                    (trial, inner)
                };
                let mut root_warm = warm;
                let root = find_root(
                    |w| self.excess(w, &mut root_warm),
                    Interval::new(lo, hi)?,
                    ENDPOINT_TOLERANCE,
                )?;
                return Ok((root, false));
            }
            if capped {
                return Ok((limit, true));
            }
            warm = trial_warm;
            inner = trial;
            step *= 2.0;
        }
    }
}

/// Profile-likelihood interval for parameter `param_index` at level [`PROFILE_LEVEL`].
///
/// Nuisance parameters are re-optimised at every trial value; the two end points
/// are searched independently (in parallel) by bracketing outward from the
/// estimate and root-finding on the profiled relative likelihood.
pub fn profile_interval(
    model: ModelSpec,
    data: &[f64],
    param_index: usize,
    fit: &FitReport,
    settings: &OptimizerSettings,
) -> Result<ProfileInterval> {
    let profiler = Profiler::new(model, data, param_index, fit, settings)?;
    let (lo, hi) = rayon::join(|| profiler.endpoint(-1.0), || profiler.endpoint(1.0));
    let ((lo, lo_open), (hi, hi_open)) = (lo?, hi?);
    let problem = &profiler.problem;
    Ok(ProfileInterval {
        lo: problem.coordinate_to_natural(param_index, lo),
        hi: problem.coordinate_to_natural(param_index, hi),
        lo_open,
        hi_open,
    })
}

/// Relative profile likelihood `max_{others} L / L(theta_hat)` at natural values of
/// parameter `param_index`.
pub fn relative_profile_likelihood(
    model: ModelSpec,
    data: &[f64],
    param_index: usize,
    values: &[f64],
    fit: &FitReport,
    settings: &OptimizerSettings,
) -> Result<Vec<f64>> {
    let profiler = Profiler::new(model, data, param_index, fit, settings)?;
    let mut probe = fit.estimates.clone();
    let mut warm = profiler.nuisance_hat();
    values
        .iter()
        .map(|&v| {
            probe[param_index] = v;
            model.distribution(&probe)?;
            let w = profiler.problem.to_working(&probe)[param_index];
            Ok((profiler.profile(w, &mut warm) - profiler.loglik_hat).exp())
        })
        .collect()
}
