//! Machine-readable (JSON) and human-readable renderings of fits and comparisons.
//!
//! Field order is fixed by the struct definitions; numbers are rounded to ten
//! significant digits so outputs compare byte-for-byte across runs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tpsas_core::inference::{Comparison, FitReport, ProfileInterval};
use tpsas_core::numerics::round_significant;

fn sig(x: f64) -> f64 {
    round_significant(x, 10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalJson {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamJson {
    pub name: String,
    pub estimate: f64,
    pub interval: Option<IntervalJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub model: String,
    pub converged: bool,
    pub n_obs: usize,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub parameters: Vec<ParamJson>,
}

/// Where the data came from and how the run was configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunJson {
    pub source: String,
    pub n_dropped: usize,
    pub log_transform: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub run: RunJson,
    pub fit: FitJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowJson {
    pub rank: Option<usize>,
    pub model: String,
    pub error: Option<String>,
    pub fit: Option<FitJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonDocument {
    pub run: RunJson,
    pub n_obs: usize,
    pub rows: Vec<RowJson>,
}

impl From<&ProfileInterval> for IntervalJson {
    fn from(iv: &ProfileInterval) -> Self {
        Self {
            lo: sig(iv.lo),
            hi: sig(iv.hi),
            lo_open: iv.lo_open,
            hi_open: iv.hi_open,
        }
    }
}

impl From<&FitReport> for FitJson {
    fn from(f: &FitReport) -> Self {
        Self {
            model: f.model.family.id().to_string(),
            converged: f.converged,
            n_obs: f.n_obs,
            loglik: sig(f.loglik),
            aic: sig(f.aic),
            bic: sig(f.bic),
            parameters: f
                .parameter_names
                .iter()
                .enumerate()
                .map(|(i, name)| ParamJson {
                    name: name.clone(),
                    estimate: sig(f.estimates[i]),
                    interval: f.intervals.get(i).map(IntervalJson::from),
                })
                .collect(),
        }
    }
}

impl ComparisonDocument {
    pub fn new(run: RunJson, c: &Comparison) -> Self {
        Self {
            run,
            n_obs: c.n_obs,
            rows: c
                .rows
                .iter()
                .map(|r| RowJson {
                    rank: r.rank,
                    model: r.model.family.id().to_string(),
                    error: r.error.clone(),
                    fit: r.fit.as_ref().map(FitJson::from),
                })
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn interval_text(iv: &ProfileInterval) -> String {
    let lo = if iv.lo_open {
        format!("<{:.3}", iv.lo)
    } else {
        format!("{:.3}", iv.lo)
    };
    let hi = if iv.hi_open {
        format!(">{:.3}", iv.hi)
    } else {
        format!("{:.3}", iv.hi)
    };
    format!("({lo}, {hi})")
}

pub fn fit_table(f: &FitReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} fit, n = {}{}",
        f.model.family.label(),
        f.n_obs,
        if f.converged { "" } else { " (NOT CONVERGED)" }
    )
    .unwrap();
    writeln!(
        out,
        "{:<10}{:>12}  95% profile interval",
        "parameter", "estimate"
    )
    .unwrap();
    for (i, name) in f.parameter_names.iter().enumerate() {
        let iv = f.intervals.get(i).map(interval_text).unwrap_or_default();
        writeln!(out, "{:<10}{:>12.4}  {}", name, f.estimates[i], iv).unwrap();
    }
    writeln!(
        out,
        "log-likelihood {:.2}   AIC {:.2}   BIC {:.2}",
        f.loglik, f.aic, f.bic
    )
    .unwrap();
    out
}

/// Models down the side, parameters across, best-AIC row in bold (`**`).
pub fn comparison_table(c: &Comparison) -> String {
    let columns = ["mu", "sigma", "skewness", "delta"];
    let cell = |f: &FitReport, col: usize| -> String {
        let index = match col {
            0 | 1 => Some(col),
            2 => f
                .parameter_names
                .iter()
                .position(|n| matches!(n.as_str(), "gamma" | "epsilon" | "lambda")),
            _ => f.parameter_names.iter().position(|n| n == "delta"),
        };
        match index {
            Some(i) => {
                let mut s = format!("{:.2}", f.estimates[i]);
                if let Some(iv) = f.intervals.get(i) {
                    s.push(' ');
                    s.push_str(&interval_text(iv));
                }
                if col == 2 {
                    s = format!("{}={s}", f.parameter_names[i]);
                }
                s
            }
            None => "-".to_string(),
        }
    };
    let mut rows: Vec<Vec<String>> = vec![{
        let mut h = vec!["model".to_string()];
        h.extend(columns.iter().map(|s| s.to_string()));
        h.extend(["AIC".to_string(), "BIC".to_string()]);
        h
    }];
    for r in &c.rows {
        let label = r.model.family.label();
        let mut row = vec![if r.rank == Some(1) {
            format!("**{label}**")
        } else {
            label.to_string()
        }];
        match &r.fit {
            Some(f) => {
                row.extend((0..4).map(|k| cell(f, k)));
                row.push(format!("{:.2}", f.aic));
                row.push(format!("{:.2}", f.bic));
            }
            None => row.extend((0..6).map(|_| "-".to_string())),
        }
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|k| rows.iter().map(|r| r[k].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    for r in &c.rows {
        if let Some(e) = &r.error {
            writeln!(out, "{}: {e}", r.model.family.label()).unwrap();
        }
    }
    out
}
