//! Replicated sampling-and-fitting study of the TP SAS maximum-likelihood estimators.
//!
//! Every replicate `r` at sample size `n` draws from its own generator seeded by
//! `(seed, n, r)`, so results do not depend on thread count or scheduling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{fit_ml, ModelFamily, ModelSpec};
use crate::numerics::{derive_seed, round_significant, stream_rng, OptimizerSettings};
use crate::two_piece::TpSasParams;

pub const PARAMETERS: [&str; 4] = ["mu", "sigma", "gamma", "delta"];
pub const MIN_SAMPLE_SIZE: usize = 20;
pub const CSV_HEADER: &str = "scenario,n,parameter,bias,variance,rmse,n_failed";

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub id: String,
    /// Epsilon-skew TP SAS truth.
    pub true_params: TpSasParams,
    pub sample_sizes: Vec<usize>,
    pub n_replicates: usize,
    pub seed: u64,
}

impl SimScenario {
    pub fn new(
        id: impl Into<String>,
        true_params: TpSasParams,
        sample_sizes: Vec<usize>,
        n_replicates: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_replicates == 0 {
            return Err(Error::InvalidInput("n_replicates must be >= 1".into()));
        }
        if sample_sizes.is_empty() {
            return Err(Error::InvalidInput("no sample sizes given".into()));
        }
        if let Some(&n) = sample_sizes.iter().find(|&&n| n < MIN_SAMPLE_SIZE) {
            return Err(Error::InvalidInput(format!(
                "sample size {n} is below the minimum of {MIN_SAMPLE_SIZE}"
            )));
        }
        Ok(Self {
            id: id.into(),
            true_params,
            sample_sizes,
            n_replicates,
            seed,
        })
    }

    pub fn truth(&self) -> [f64; 4] {
        let p = &self.true_params;
        [p.mu, p.sigma(), p.gamma(), p.delta]
    }
}

/// One `[[scenario]]` table of a scenario file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    id: String,
    mu: f64,
    sigma: f64,
    gamma: f64,
    delta: f64,
    sample_sizes: Vec<usize>,
    replicates: usize,
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: Vec<ScenarioEntry>,
}

/// Parses scenario tables:
///
/// ```toml
/// [[scenario]]
/// id = "light"
/// mu = 0.0
/// sigma = 1.0
/// gamma = 0.25
/// delta = 1.25
/// sample_sizes = [250, 500, 1000]
/// replicates = 1000
/// seed = 1
/// ```
pub fn parse_scenarios(text: &str) -> Result<Vec<SimScenario>> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))?;
    file.scenario
        .into_iter()
        .map(|e| {
            let p = TpSasParams::epsilon_skew(e.mu, e.sigma, e.gamma, e.delta)?;
            SimScenario::new(e.id, p, e.sample_sizes, e.replicates, e.seed)
        })
        .collect()
}

/// Estimates of one replicate; `None` when the fit raised an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub estimates: Option<[f64; 4]>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamStats {
    pub bias: f64,
    /// Mean squared deviation from the replicate mean (divisor N).
    pub variance: f64,
    pub rmse: f64,
    /// Replicates entering the aggregate.
    pub n_used: usize,
}

impl ParamStats {
    fn from_estimates(values: &[f64], truth: f64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                bias: f64::NAN,
                variance: f64::NAN,
                rmse: f64::NAN,
                n_used: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let bias = mean - truth;
        Self {
            bias,
            variance,
            rmse: (bias * bias + variance).sqrt(),
            n_used: n,
        }
    }

    /// Monte Carlo standard error of the bias.
    pub fn bias_se(&self) -> f64 {
        (self.variance / self.n_used as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimCell {
    pub n: usize,
    /// Over every replicate that produced estimates, converged or not.
    pub all: [ParamStats; 4],
    /// Over converged replicates only.
    pub converged_only: [ParamStats; 4],
    /// Replicates that errored or did not converge.
    pub n_failed: usize,
    pub replicates: Vec<Replicate>,
}

impl SimCell {
    pub fn from_replicates(n: usize, truth: [f64; 4], replicates: Vec<Replicate>) -> Self {
        let stats = |converged_only: bool| {
            std::array::from_fn(|j| {
                let values: Vec<f64> = replicates
                    .iter()
                    .filter(|r| r.converged || !converged_only)
                    .filter_map(|r| r.estimates.map(|e| e[j]))
                    .collect();
                ParamStats::from_estimates(&values, truth[j])
            })
        };
        Self {
            n,
            all: stats(false),
            converged_only: stats(true),
            n_failed: replicates.iter().filter(|r| !r.converged).count(),
            replicates,
        }
    }

    pub fn stats(&self, parameter: &str) -> Option<&ParamStats> {
        PARAMETERS
            .iter()
            .position(|&p| p == parameter)
            .map(|j| &self.all[j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: String,
    pub truth: [f64; 4],
    /// One cell per sample size, in the scenario's order.
    pub cells: Vec<SimCell>,
}

/// Runs every (sample size, replicate) fit of the scenario; replicates in parallel.
pub fn run_study(s: &SimScenario, settings: &OptimizerSettings) -> Result<SimReport> {
    settings.validate()?;
    let spec = ModelSpec::new(ModelFamily::TpSas);
    let truth = s.truth();
    let cells = s
        .sample_sizes
        .iter()
        .map(|&n| {
            let replicates: Vec<Replicate> = (0..s.n_replicates)
                .into_par_iter()
                .map(|r| {
                    let seed = derive_seed(&[s.seed, n as u64, r as u64]);
                    let data = s.true_params.sample_with(&mut stream_rng(seed, 0), n);
                    match fit_ml(spec, &data, settings, seed) {
                        Ok(f) => Replicate {
                            estimates: Some([
                                f.estimates[0],
                                f.estimates[1],
                                f.estimates[2],
                                f.estimates[3],
                            ]),
                            converged: f.converged,
                        },
                        Err(_) => Replicate {
                            estimates: None,
                            converged: false,
                        },
                    }
                })
                .collect();
            SimCell::from_replicates(n, truth, replicates)
        })
        .collect();
    Ok(SimReport {
        scenario: s.id.clone(),
        truth,
        cells,
    })
}

/// Whether `|bias|` of `parameter` falls with `n`: it never rises by more than two
/// Monte Carlo standard errors between consecutive sample sizes, and overall it
/// drops by more than two standard errors from the smallest to the largest `n`.
pub fn bias_shrinks(report: &SimReport, parameter: &str) -> Result<bool> {
    let mut cells: Vec<&SimCell> = report.cells.iter().collect();
    cells.sort_by_key(|c| c.n);
    if cells.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            got: cells.len(),
        });
    }
    let stats: Vec<&ParamStats> = cells
        .iter()
        .map(|c| {
            c.stats(parameter)
                .ok_or_else(|| Error::InvalidInput(format!("unknown parameter '{parameter}'")))
        })
        .collect::<Result<_>>()?;
    let tolerance = |a: &ParamStats, b: &ParamStats| 2.0 * a.bias_se().hypot(b.bias_se());
    let no_rise = stats
        .windows(2)
        .all(|w| w[1].bias.abs() <= w[0].bias.abs() + tolerance(w[0], w[1]));
    let (first, last) = (stats[0], stats[stats.len() - 1]);
    let drops = first.bias.abs() - last.bias.abs() > tolerance(first, last);
    Ok(no_rise && drops)
}

impl SimReport {
    /// Machine-readable table, numbers to 10 significant digits.
    pub fn to_csv(&self, converged_only: bool) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        self.write_csv_rows(&mut out, converged_only);
        out
    }

    pub fn write_csv_rows(&self, out: &mut String, converged_only: bool) {
        for cell in &self.cells {
            let stats = if converged_only {
                &cell.converged_only
            } else {
                &cell.all
            };
            for (name, s) in PARAMETERS.iter().zip(stats) {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    self.scenario,
                    cell.n,
                    name,
                    round_significant(s.bias, 10),
                    round_significant(s.variance, 10),
                    round_significant(s.rmse, 10),
                    cell.n_failed
                )
                .unwrap();
            }
        }
    }

    /// Human-readable layout: one block per parameter, sample sizes across.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let [mu, sigma, gamma, delta] = self.truth;
        writeln!(
            out,
            "scenario {}: mu = {mu}, sigma = {sigma}, gamma = {gamma}, delta = {delta}",
            self.scenario
        )
        .unwrap();
        write!(out, "{:<16}", "").unwrap();
        for cell in &self.cells {
            write!(out, "{:>12}", format!("n={}", cell.n)).unwrap();
        }
        out.push('\n');
        for (j, name) in PARAMETERS.iter().enumerate() {
            for (label, get) in [
                ("bias", (|s: &ParamStats| s.bias) as fn(&ParamStats) -> f64),
                ("variance", |s| s.variance),
                ("RMSE", |s| s.rmse),
            ] {
                write!(out, "{:<16}", format!("{label} {name}")).unwrap();
                for cell in &self.cells {
                    write!(out, "{:>12}", format_human(get(&cell.all[j]))).unwrap();
                }
                out.push('\n');
            }
        }
        write!(out, "{:<16}", "failed fits").unwrap();
        for cell in &self.cells {
            write!(out, "{:>12}", cell.n_failed).unwrap();
        }
        out.push('\n');
        out
    }
}

fn format_human(x: f64) -> String {
    if !x.is_finite() {
        format!("{x}")
    } else if x != 0.0 && (x.abs() >= 1e5 || x.abs() < 1e-3) {
        format!("{x:.2e}")
    } else {
        format!("{x:.4}")
    }
}
