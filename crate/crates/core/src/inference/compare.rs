use rayon::prelude::*;
use serde::Serialize;

use super::{fit_ml, FitReport, ModelSpec};
use crate::error::{Error, Result};
use crate::numerics::OptimizerSettings;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: ModelSpec,
    /// 1-based AIC rank; `None` for rows whose fit failed or did not converge.
    pub rank: Option<usize>,
    pub fit: Option<FitReport>,
    pub error: Option<String>,
}

/// Fitted models, ranked rows first (by AIC, ties by BIC), then unranked rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub n_obs: usize,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn best(&self) -> Option<&FitReport> {
        self.rows
            .first()
            .filter(|r| r.rank == Some(1))?
            .fit
            .as_ref()
    }
}

/// Fits every model (in parallel) and ranks them by information criteria.
///
/// Each model gets its own seed derived from `seed`, so the result does not depend
/// on the order of `models`. With `with_intervals` every parameter also gets a
/// profile interval. Per-model failures are recorded in their row.
pub fn compare_models(
    data: &[f64],
    models: &[ModelSpec],
    settings: &OptimizerSettings,
    seed: u64,
    with_intervals: bool,
) -> Result<Comparison> {
    if models.is_empty() {
        return Err(Error::InvalidInput("no models to compare".into()));
    }
    let mut rows: Vec<ComparisonRow> = models
        .par_iter()
        .map(|&model| {
            let fit = fit_ml(model, data, settings, seed).and_then(|f| {
                if with_intervals && f.converged {
                    f.with_intervals(data, settings)
                } else {
                    Ok(f)
                }
            });
            match fit {
                Ok(f) => ComparisonRow {
                    model,
                    rank: None,
                    error: (!f.converged).then(|| "optimizer did not converge".to_string()),
                    fit: Some(f),
                },
                Err(e) => ComparisonRow {
                    model,
                    rank: None,
                    fit: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let key = |r: &ComparisonRow| match &r.fit {
        Some(f) if f.converged => (0, f.aic, f.bic),
        _ => (1, f64::INFINITY, f64::INFINITY),
    };
    // stable sort keeps the caller's order among equal keys
    rows.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
    });
    let mut rank = 0;
    for row in &mut rows {
        if key(row).0 == 0 {
            rank += 1;
            row.rank = Some(rank);
        }
    }
    Ok(Comparison {
        n_obs: data.len(),
        rows,
    })
}
