//! Goodness-of-fit output: simulation envelopes for QQ plots and fitted-density
//! overlays, as CSV tables and small self-contained SVG files.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{Distribution, FitReport};
use crate::numerics::{round_significant, stream_rng};

pub const DEFAULT_N_SIM: usize = 500;

/// Pointwise band of simulated order statistics against the sorted data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QqEnvelope {
    /// Sorted data.
    pub probe_quantiles: Vec<f64>,
    pub env_lo: Vec<f64>,
    pub env_hi: Vec<f64>,
    pub n_sim: usize,
    /// Central coverage of a percentile band; `None` for the min/max envelope.
    pub band: Option<f64>,
}

impl QqEnvelope {
    /// Share of order statistics with `env_lo <= data <= env_hi` (the identity line
    /// inside the band), ignoring `trim` of the points at each end.
    pub fn fraction_inside(&self, trim: f64) -> f64 {
        let n = self.probe_quantiles.len();
        let skip = (trim * n as f64).floor() as usize;
        let range = skip..n.saturating_sub(skip);
        let total = range.len();
        if total == 0 {
            return f64::NAN;
        }
        let inside = range
            .filter(|&i| {
                self.env_lo[i] <= self.probe_quantiles[i]
                    && self.probe_quantiles[i] <= self.env_hi[i]
            })
            .count();
        inside as f64 / total as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("data_quantile,env_lo,env_hi\n");
        for i in 0..self.probe_quantiles.len() {
            writeln!(
                out,
                "{},{},{}",
                round_significant(self.probe_quantiles[i], 10),
                round_significant(self.env_lo[i], 10),
                round_significant(self.env_hi[i], 10)
            )
            .unwrap();
        }
        out
    }

    /// Shaded envelope against the data quantiles, with the identity line.
    pub fn to_svg(&self, title: &str) -> String {
        let x = &self.probe_quantiles;
        let mut plot = SvgPlot::new(title, "data quantile", "simulated quantile");
        plot.band(x, &self.env_lo, &self.env_hi);
        let (lo, hi) = (x[0], x[x.len() - 1]);
        plot.line("identity", &[lo, hi], &[lo, hi]);
        plot.render()
    }
}

/// Envelope of `n_sim` simulated samples of the data's size from `fitted`.
///
/// Simulation `k` uses stream `k` of `seed`, so a run with more simulations extends
/// a shorter one and its envelope contains it. With `band = Some(c)` the envelope
/// is the central `c` percentile band instead of the min/max.
pub fn qq_envelope(
    fitted: &Distribution,
    data: &[f64],
    n_sim: usize,
    seed: u64,
    band: Option<f64>,
) -> Result<QqEnvelope> {
    if n_sim < 2 {
        return Err(Error::InvalidInput("n_sim must be at least 2".into()));
    }
    if data.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            got: 0,
        });
    }
    if let Some(c) = band {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidInput(format!("band {c} must lie in (0, 1)")));
        }
    }
    let n = data.len();
    let mut probe = data.to_vec();
    probe.sort_by(f64::total_cmp);

    let simulate = |k: usize| {
        let mut s = fitted.sample_with(&mut stream_rng(seed, k as u64), n);
        s.sort_by(f64::total_cmp);
        s
    };
    let (env_lo, env_hi) = match band {
        None => (0..n_sim)
            .into_par_iter()
            .map(|k| {
                let s = simulate(k);
                (s.clone(), s)
            })
            .reduce_with(|(mut lo, mut hi), (l, h)| {
                for i in 0..n {
                    lo[i] = lo[i].min(l[i]);
                    hi[i] = hi[i].max(h[i]);
                }
                (lo, hi)
            })
            .expect("n_sim >= 2"),
        Some(c) => {
            let sims: Vec<Vec<f64>> = (0..n_sim).into_par_iter().map(simulate).collect();
            let tail = (1.0 - c) / 2.0;
            let mut column = vec![0.0; n_sim];
            let mut lo = Vec::with_capacity(n);
            let mut hi = Vec::with_capacity(n);
            for i in 0..n {
                for (c, s) in column.iter_mut().zip(&sims) {
                    *c = s[i];
                }
                column.sort_by(f64::total_cmp);
                lo.push(empirical_quantile(&column, tail));
                hi.push(empirical_quantile(&column, 1.0 - tail));
            }
            (lo, hi)
        }
    };
    Ok(QqEnvelope {
        probe_quantiles: probe,
        env_lo,
        env_hi,
        n_sim,
        band,
    })
}

/// Linear-interpolation quantile of sorted values.
fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let next = sorted[(i + 1).min(sorted.len() - 1)];
    sorted[i] + (h - i as f64) * (next - sorted[i])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Bin edges, one more than `density`.
    pub edges: Vec<f64>,
    /// Count / (n * width) per bin.
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityOverlay {
    pub histogram: Histogram,
    pub grid: Vec<f64>,
    /// `(label, pdf on grid)` for each fit.
    pub curves: Vec<(String, Vec<f64>)>,
}

/// Freedman-Diaconis histogram of `data`, falling back to Sturges' rule when the
/// interquartile range is zero.
pub fn histogram(data: &[f64]) -> Result<Histogram> {
    if data.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            got: data.len(),
        });
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let range = max - min;
    let iqr = empirical_quantile(&sorted, 0.75) - empirical_quantile(&sorted, 0.25);
    let bins = if range <= 0.0 {
        1
    } else if iqr > 0.0 {
        ((range / (2.0 * iqr * n.powf(-1.0 / 3.0))).ceil() as usize).clamp(1, 10_000)
    } else {
        (n.log2().ceil() as usize + 1).max(1)
    };
    let width = if range > 0.0 {
        range / bins as f64
    } else {
        1.0
    };
    let edges: Vec<f64> = (0..=bins)
        .map(|k| {
            if k == bins {
                min + range.max(width)
            } else {
                min + k as f64 * width
            }
        })
        .collect();
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        let k = (((x - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram {
        density: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        edges,
    })
}

/// Histogram plus each fitted pdf on a uniform grid over the data range widened by
/// 10% of the range on each side.
pub fn density_overlay(
    fits: &[FitReport],
    data: &[f64],
    grid_size: usize,
) -> Result<DensityOverlay> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("grid_size must be at least 2".into()));
    }
    let histogram = histogram(data)?;
    let min = data.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.1 * (max - min);
    let (lo, hi) = (min - pad, max + pad);
    let step = (hi - lo) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size)
        .map(|k| {
            if k == grid_size - 1 {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect();
    let curves = fits
        .iter()
        .map(|f| {
            let d = f.distribution()?;
            Ok((
                f.model.family.label().to_string(),
                grid.iter().map(|&x| d.pdf(x)).collect(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(DensityOverlay {
        histogram,
        grid,
        curves,
    })
}

impl DensityOverlay {
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,density\n");
        let h = &self.histogram;
        for (k, d) in h.density.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                round_significant(h.edges[k], 10),
                round_significant(h.edges[k + 1], 10),
                round_significant(*d, 10)
            )
            .unwrap();
        }
        out
    }

    /// Grid column followed by one pdf column per fit.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("x");
        for (label, _) in &self.curves {
            write!(out, ",{}", label.replace(' ', "_")).unwrap();
        }
        out.push('\n');
        for (i, x) in self.grid.iter().enumerate() {
            write!(out, "{}", round_significant(*x, 10)).unwrap();
            for (_, ys) in &self.curves {
                write!(out, ",{}", round_significant(ys[i], 10)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_svg(&self, title: &str) -> String {
        let mut plot = SvgPlot::new(title, "x", "density");
        plot.bars(&self.histogram.edges, &self.histogram.density);
        for (label, ys) in &self.curves {
            plot.line(label, &self.grid, ys);
        }
        plot.render()
    }
}

/// Minimal SVG line/band/bar chart with linear axes.
pub struct SvgPlot {
    title: String,
    x_label: String,
    y_label: String,
    elements: Vec<Element>,
}

enum Element {
    Line(String, Vec<(f64, f64)>),
    Band(Vec<(f64, f64)>),
    Bars(Vec<(f64, f64, f64)>),
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1b4f72", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#515a5a",
];

impl SvgPlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            elements: Vec::new(),
        }
    }

    pub fn line(&mut self, label: &str, x: &[f64], y: &[f64]) -> &mut Self {
        let pts = x.iter().zip(y).map(|(&a, &b)| (a, b)).collect();
        self.elements.push(Element::Line(label.into(), pts));
        self
    }

    /// Shaded region between `lo` and `hi` over `x`.
    pub fn band(&mut self, x: &[f64], lo: &[f64], hi: &[f64]) -> &mut Self {
        let mut pts: Vec<(f64, f64)> = x.iter().zip(hi).map(|(&a, &b)| (a, b)).collect();
        pts.extend(x.iter().zip(lo).rev().map(|(&a, &b)| (a, b)));
        self.elements.push(Element::Band(pts));
        self
    }

    pub fn bars(&mut self, edges: &[f64], heights: &[f64]) -> &mut Self {
        let bars = heights
            .iter()
            .enumerate()
            .map(|(k, &h)| (edges[k], edges[k + 1], h))
            .collect();
        self.elements.push(Element::Bars(bars));
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        let mut grow = |x: f64, y: f64| {
            if x.is_finite() && y.is_finite() {
                b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
            }
        };
        for e in &self.elements {
            match e {
                Element::Line(_, p) | Element::Band(p) => p.iter().for_each(|&(x, y)| grow(x, y)),
                Element::Bars(bars) => bars.iter().for_each(|&(a, c, h)| {
                    grow(a, 0.0);
                    grow(c, h);
                }),
            }
        }
        if !(b.1 > b.0) {
            b = (b.0 - 0.5, b.0 + 0.5, b.2, b.3);
        }
        if !(b.3 > b.2) {
            b = (b.0, b.1, b.2 - 0.5, b.2 + 0.5);
        }
        b
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let path = |pts: &[(f64, f64)]| {
            pts.iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        let mut color = 0;
        let mut legend = Vec::new();
        for e in &self.elements {
            match e {
                Element::Band(p) => {
                    writeln!(s, r##"<polygon points="{}" fill="#aab7c4" fill-opacity="0.6" stroke="none"/>"##, path(p)).unwrap();
                }
                Element::Bars(bars) => {
                    for &(a, c, h) in bars {
                        writeln!(
                            s,
                            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d5d8dc" stroke="#808b96" stroke-width="0.5"/>"##,
                            px(a),
                            py(h),
                            (px(c) - px(a)).max(0.0),
                            (py(0.0f64.max(y0)) - py(h)).max(0.0)
                        )
                        .unwrap();
                    }
                }
                Element::Line(label, p) => {
                    let c = PALETTE[color % PALETTE.len()];
                    color += 1;
                    writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.6"/>"#,
                        path(p)
                    )
                    .unwrap();
                    legend.push((label.clone(), c));
                }
            }
        }
        writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        )
        .unwrap();
        for (k, (label, c)) in legend.iter().enumerate() {
            let y = MARGIN + 16.0 + 16.0 * k as f64;
            writeln!(
                s,
                r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{c}" stroke-width="2"/>"#,
                MARGIN + 10.0,
                MARGIN + 30.0
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                MARGIN + 36.0,
                y + 4.0,
                escape(label)
            )
            .unwrap();
        }
        for (v, anchor_x, anchor_y) in [
            (x0, px(x0), HEIGHT - MARGIN + 16.0),
            (x1, px(x1), HEIGHT - MARGIN + 16.0),
        ] {
            writeln!(
                s,
                r#"<text x="{anchor_x:.2}" y="{anchor_y}" text-anchor="middle">{}</text>"#,
                tick(v)
            )
            .unwrap();
        }
        for v in [y0, y1] {
            writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN - 6.0,
                py(v) + 4.0,
                tick(v)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    format!("{}", round_significant(v, 4))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
