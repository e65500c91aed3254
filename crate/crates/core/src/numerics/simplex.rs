use crate::error::{Error, Result};

/// Stopping rules for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Iteration cap for each simplex run.
    pub max_iterations: usize,
    /// Largest vertex distance (max-norm) from the best vertex at convergence.
    pub x_tolerance: f64,
    /// Largest objective spread across the simplex at convergence.
    pub f_tolerance: f64,
    /// Number of fresh simplices rebuilt around the best point after convergence.
    pub restarts: usize,
    /// Edge length of each freshly built simplex.
    pub initial_step: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            x_tolerance: 1e-7,
            f_tolerance: 1e-9,
            restarts: 1,
            initial_step: 0.25,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be >= 1".into()));
        }
        for (name, v) in [
            ("x_tolerance", self.x_tolerance),
            ("f_tolerance", self.f_tolerance),
            ("initial_step", self.initial_step),
        ] {
            crate::error::check_positive(name, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Derivative-free Nelder-Mead minimisation.
///
/// After a run meets both tolerances a new simplex is built around the best
/// vertex (up to `settings.restarts` times); the search stops once a restart
/// fails to improve the objective by more than `f_tolerance`. Non-finite
/// objective values are treated as `+inf`, so the caller may signal
/// infeasibility that way.
pub fn minimize<F>(mut f: F, start: &[f64], settings: &OptimizerSettings) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    settings.validate()?;
    if start.is_empty() {
        return Err(Error::InvalidInput("empty start vector".into()));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let start_value = eval(start);
    if !start_value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "objective is not finite at the start point {start:?}"
        )));
    }

    let mut best = (start.to_vec(), start_value);
    let mut converged = false;
    for run in 0..=settings.restarts {
        let (x, v, ok) = nelder_mead(&mut eval, &best.0, best.1, settings);
        let improvement = best.1 - v;
        if v <= best.1 {
            best = (x, v);
        }
        converged = ok;
        if !ok || (run > 0 && improvement <= settings.f_tolerance) {
            break;
        }
    }
    Ok(Minimum {
        argmin: best.0,
        value: best.1,
        converged,
        evaluations,
    })
}

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    start_value: f64,
    settings: &OptimizerSettings,
) -> (Vec<f64>, f64, bool) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), start_value));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += settings.initial_step;
        let v = f(&x);
        simplex.push((x, v));
    }

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..settings.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best_x, best_v) = (&simplex[0].0, simplex[0].1);
        let worst_v = simplex[n].1;
        let f_spread = worst_v - best_v;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= settings.f_tolerance && x_spread <= settings.x_tolerance {
            return (simplex[0].0.clone(), best_v, true);
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |coef: f64, out: &mut Vec<f64>, worst: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(worst) {
                *o = c + coef * (c - w);
            }
        };

        let worst = simplex[n].0.clone();
        along(REFLECT, &mut trial, &worst);
        let reflected_v = f(&trial);
        if reflected_v < best_v {
            let reflected = trial.clone();
            along(EXPAND, &mut trial, &worst);
            let expanded_v = f(&trial);
            simplex[n] = if expanded_v < reflected_v {
                (trial.clone(), expanded_v)
            } else {
                (reflected, reflected_v)
            };
            continue;
        }
        if reflected_v < simplex[n - 1].1 {
            simplex[n] = (trial.clone(), reflected_v);
            continue;
        }
        // contraction: outside if the reflection beat the worst point, inside otherwise
        let outside = reflected_v < worst_v;
        along(
            if outside { CONTRACT } else { -CONTRACT },
            &mut trial,
            &worst,
        );
        let contracted_v = f(&trial);
        if contracted_v < reflected_v.min(worst_v) {
            simplex[n] = (trial.clone(), contracted_v);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, v) in simplex[1..].iter_mut() {
            for (xi, a) in x.iter_mut().zip(&anchor) {
                *xi = a + SHRINK * (*xi - a);
            }
            *v = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, false)
}
