mod data;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tpsas_core::asymmetry::{ag_measure, cj_curve, default_p_grid};
use tpsas_core::diagnostics::{density_overlay, qq_envelope, SvgPlot, DEFAULT_N_SIM};
use tpsas_core::inference::{compare_models, fit_ml, FitReport};
use tpsas_core::montecarlo::{parse_scenarios, run_study, CSV_HEADER};
use tpsas_core::numerics::round_significant;
use tpsas_core::{Distribution, Error, ModelFamily, ModelSpec, OptimizerSettings};

use data::Dataset;
use output::{emit, sibling, write_atomic};
use report::{ComparisonDocument, FitDocument, FitJson, RunJson};

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    InsufficientData(String),
    NonConvergence(String),
    BadFlags(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::InsufficientData(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::BadFlags(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m)
            | CliError::InsufficientData(m)
            | CliError::NonConvergence(m)
            | CliError::BadFlags(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientData { .. } => CliError::InsufficientData(e.to_string()),
            Error::Domain { .. } | Error::InvalidInput(_) => CliError::BadFlags(e.to_string()),
            _ => CliError::NonConvergence(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "tpsas",
    version,
    about = "Fit, compare, measure and simulate sinh-arcsinh distributions"
)]
struct Cli {
    /// Seed for every randomised step (required by fit, compare, sample and qq).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "TPSAS_THREADS")]
    threads: Option<usize>,
    /// Machine-readable output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Take natural logarithms of the ingested data.
    #[arg(long, global = true)]
    log: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum-likelihood fit with profile-likelihood intervals.
    Fit {
        data: PathBuf,
        #[arg(long, short, value_parser = parse_family)]
        model: ModelFamily,
        /// Skip the profile intervals.
        #[arg(long)]
        no_intervals: bool,
        /// Write fitted-density overlay tables (CSV) and an SVG next to this path.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Fit several models and rank them by AIC (ties by BIC).
    Compare {
        data: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_family,
              default_value = "normal,sn,sas,tpsas,sssas")]
        models: Vec<ModelFamily>,
        #[arg(long)]
        no_intervals: bool,
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// AG skewness and the CJ asymmetry curve of a distribution.
    Measure {
        #[arg(long, short, value_parser = parse_family)]
        model: ModelFamily,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        /// Comma-separated levels in (0, 1); default 0.01, 0.02, ..., 0.99.
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the estimator study described by a scenario file.
    Simulate { config: PathBuf },
    /// Evaluate pdf, cdf or quantile at the given points.
    Eval {
        #[arg(long, short, value_parser = parse_family)]
        model: ModelFamily,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(required = true, allow_negative_numbers = true)]
        points: Vec<f64>,
    },
    /// Draw a random sample, one value per line.
    Sample {
        #[arg(long, short, value_parser = parse_family)]
        model: ModelFamily,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(short, long)]
        n: usize,
    },
    /// Simulation envelope for the QQ plot of a fitted model.
    Qq {
        data: PathBuf,
        /// JSON report written by `fit`.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = DEFAULT_N_SIM)]
        n_sim: usize,
        /// Central percentile band (e.g. 0.95) instead of the min/max envelope.
        #[arg(long)]
        band: Option<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Pdf,
    Cdf,
    Quantile,
}

fn parse_family(s: &str) -> Result<ModelFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::BadFlags("this command needs an explicit --seed".into()))
}

fn load(path: &Path, log: bool) -> Result<Dataset, CliError> {
    let mut d = Dataset::read(path)?;
    if log {
        d = d.log_transform()?;
    }
    if let Some(w) = d.warning() {
        eprintln!("{w}");
    }
    Ok(d)
}

fn run_info(d: &Dataset, log: bool, seed: u64) -> RunJson {
    RunJson {
        source: d.source_path.clone(),
        n_dropped: d.n_dropped,
        log_transform: log,
        seed,
    }
}

fn distribution(model: ModelFamily, params: &[f64]) -> Result<Distribution, CliError> {
    Ok(ModelSpec::new(model).distribution(params)?)
}

fn write_overlay(path: &Path, fits: &[FitReport], data: &[f64]) -> Result<(), CliError> {
    let overlay = density_overlay(fits, data, 400)?;
    write_atomic(path, &overlay.curves_csv())?;
    write_atomic(&sibling(path, ".hist.csv"), &overlay.histogram_csv())?;
    write_atomic(&sibling(path, ".svg"), &overlay.to_svg("Fitted densities"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::BadFlags("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, in which case that pool is used.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let settings = OptimizerSettings::default();
    let out = cli.out.as_deref();
    match cli.command {
        Command::Fit {
            data,
            model,
            no_intervals,
            overlay,
        } => {
            let seed = require_seed(cli.seed)?;
            let d = load(&data, cli.log)?;
            let mut fit = fit_ml(model.into(), &d.values, &settings, seed)?;
            if fit.converged && !no_intervals {
                fit = fit.with_intervals(&d.values, &settings)?;
            }
            let doc = FitDocument {
                run: run_info(&d, cli.log, seed),
                fit: FitJson::from(&fit),
            };
            emit(out, &report::to_json(&doc), &report::fit_table(&fit))?;
            if let Some(p) = overlay {
                write_overlay(&p, std::slice::from_ref(&fit), &d.values)?;
            }
            if !fit.converged {
                return Err(CliError::NonConvergence(
                    "optimizer did not converge; best point reported".into(),
                ));
            }
        }
        Command::Compare {
            data,
            models,
            no_intervals,
            overlay,
        } => {
            let seed = require_seed(cli.seed)?;
            let d = load(&data, cli.log)?;
            let specs: Vec<ModelSpec> = models.iter().map(|&m| m.into()).collect();
            let c = compare_models(&d.values, &specs, &settings, seed, !no_intervals)?;
            let doc = ComparisonDocument::new(run_info(&d, cli.log, seed), &c);
            emit(out, &report::to_json(&doc), &report::comparison_table(&c))?;
            if let Some(p) = overlay {
                let fits: Vec<FitReport> = c.rows.iter().filter_map(|r| r.fit.clone()).collect();
                write_overlay(&p, &fits, &d.values)?;
            }
            if c.rows.iter().all(|r| r.rank.is_none()) {
                if let Some(e) = c.rows.iter().find_map(|r| r.error.as_ref()) {
                    if e.contains("need at least") {
                        return Err(CliError::InsufficientData(e.clone()));
                    }
                }
                return Err(CliError::NonConvergence("no model converged".into()));
            }
        }
        Command::Measure {
            model,
            params,
            p_grid,
            svg,
        } => {
            let dist = distribution(model, &params)?;
            let grid = p_grid.unwrap_or_else(default_p_grid);
            let ag = ag_measure(&dist)?;
            let curve = cj_curve(&dist, &grid)?;
            let mut csv = String::from("p,cj\n");
            for (p, v) in curve.p_grid.iter().zip(&curve.cj_values) {
                csv.push_str(&format!("{},{}\n", p, round_significant(*v, 10)));
            }
            println!("AG = {}", round_significant(ag, 10));
            match out {
                Some(path) => write_atomic(path, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(path) = svg {
                let mut plot = SvgPlot::new("CJ asymmetry curve", "p", "CJ(p)");
                plot.line(model.label(), &curve.p_grid, &curve.cj_values);
                write_atomic(&path, &plot.render())?;
            }
        }
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
            let scenarios = parse_scenarios(&text)?;
            let mut csv = format!("{CSV_HEADER}\n");
            let mut converged = csv.clone();
            let mut tables = String::new();
            for s in &scenarios {
                let report = run_study(s, &settings)?;
                report.write_csv_rows(&mut csv, false);
                report.write_csv_rows(&mut converged, true);
                tables.push_str(&report.render_table());
                tables.push('\n');
            }
            emit(out, &csv, &tables)?;
            if let Some(path) = out {
                write_atomic(&sibling(path, ".converged.csv"), &converged)?;
                write_atomic(&sibling(path, ".txt"), &tables)?;
            }
        }
        Command::Eval {
            model,
            params,
            which,
            points,
        } => {
            let dist = distribution(model, &params)?;
            let mut text = String::new();
            for p in points {
                let v = match which {
                    Which::Pdf => dist.pdf(p),
                    Which::Cdf => dist.cdf(p)?,
                    Which::Quantile => dist.quantile(p)?,
                };
                text.push_str(&format!("{v}\n"));
            }
            match out {
                Some(path) => write_atomic(path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Sample { model, params, n } => {
            let seed = require_seed(cli.seed)?;
            if n == 0 {
                return Err(CliError::BadFlags("-n must be at least 1".into()));
            }
            let dist = distribution(model, &params)?;
            let text: String = dist
                .sample(n, seed)
                .iter()
                .map(|v| format!("{v}\n"))
                .collect();
            match out {
                Some(path) => write_atomic(path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Qq {
            data,
            report,
            n_sim,
            band,
            svg,
        } => {
            let seed = require_seed(cli.seed)?;
            let d = load(&data, cli.log)?;
            let text = std::fs::read_to_string(&report)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", report.display())))?;
            let doc: FitDocument = serde_json::from_str(&text).map_err(|e| {
                CliError::Io(format!("{}: not a fit report: {e}", report.display()))
            })?;
            let family = parse_family(&doc.fit.model).map_err(CliError::Io)?;
            let estimates: Vec<f64> = doc.fit.parameters.iter().map(|p| p.estimate).collect();
            let dist = distribution(family, &estimates)?;
            let env = qq_envelope(&dist, &d.values, n_sim, seed, band)?;
            let summary = format!(
                "{} envelope from {} simulations: {:.1}% of data quantiles inside\n",
                family.label(),
                n_sim,
                100.0 * env.fraction_inside(0.0)
            );
            emit(out, &env.to_csv(), &summary)?;
            if let Some(path) = svg {
                let title = format!("Envelope QQ plot, {}", family.label());
                write_atomic(&path, &env.to_svg(&title))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
