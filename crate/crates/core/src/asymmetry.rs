//! Mode-based asymmetry measures.
//!
//! - AG: probability mass right of the mode minus mass left of it, `1 - 2 F(mode)`.
//! - CJ(p): with `x_L < mode < x_R` the two points where the density equals
//!   `p * f(mode)`, `CJ(p) = (x_R - 2 mode + x_L) / (x_R - x_L)`.
//!
//! Both lie in (-1, 1) and are invariant under increasing affine maps.

use crate::error::{Error, Result};
use crate::numerics::{expand_bracket, find_root, Interval};
use crate::sas::{SasParams, SymmetricSas};
use crate::skew_symmetric::SsSasParams;
use crate::two_piece::TpSasParams;

/// Number of points in the pre-scan used to locate (and vet) the mode.
pub const SCAN_POINTS: usize = 2001;
/// Absolute x-tolerance of the returned mode.
pub const MODE_TOLERANCE: f64 = 1e-8;
/// x-tolerance of the CJ level crossings, relative to `max(1, |x|)`.
pub const CJ_ROOT_TOLERANCE: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 60;

/// A density with a single maximum, plus what the measures need to find it.
///
/// The mode scan runs over `search_interval()` in a scan coordinate `t`, mapped to the
/// real line by `scan_to_x`. The default is the identity; the sinh-arcsinh families
/// scan in `asinh((x - mu) / sigma)`, which keeps both very light and very heavy
/// tails resolved with a fixed number of points.
pub trait UnimodalDensity {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> Result<f64>;
    fn search_interval(&self) -> Interval;

    fn scan_to_x(&self, t: f64) -> f64 {
        t
    }

    /// Typical width of the density; initial step when bracketing CJ crossings.
    fn scale(&self) -> f64 {
        let s = self.search_interval();
        (self.scan_to_x(s.hi) - self.scan_to_x(s.lo)) / 40.0
    }

    fn known_mode(&self) -> Option<f64> {
        None
    }
}

/// Closure-backed [`UnimodalDensity`] scanned on a plain x-grid.
pub struct FnDensity<P, C> {
    pub pdf: P,
    pub cdf: C,
    pub search_interval: Interval,
    pub known_mode: Option<f64>,
}

impl<P, C> UnimodalDensity for FnDensity<P, C>
where
    P: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        Ok((self.cdf)(x))
    }

    fn search_interval(&self) -> Interval {
        self.search_interval
    }

    fn known_mode(&self) -> Option<f64> {
        self.known_mode
    }
}

/// Scan range in `asinh` coordinates covering the `[1e-9, 1 - 1e-9]` quantile range
/// (and the centre), padded by one unit.
fn asinh_scan(lo_z: f64, hi_z: f64) -> Interval {
    let lo = lo_z.asinh().min(0.0) - 1.0;
    let hi = hi_z.asinh().max(0.0) + 1.0;
    Interval { lo, hi }
}

const SCAN_TAIL: f64 = 1e-9;

impl UnimodalDensity for SasParams {
    fn pdf(&self, x: f64) -> f64 {
        SasParams::pdf(self, x)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(SasParams::cdf(self, x))
    }

    fn search_interval(&self) -> Interval {
        let lo = (self.quantile(SCAN_TAIL).expect("valid level") - self.mu) / self.sigma;
        let hi = (self.quantile(1.0 - SCAN_TAIL).expect("valid level") - self.mu) / self.sigma;
        asinh_scan(lo, hi)
    }

    fn scan_to_x(&self, t: f64) -> f64 {
        self.mu + self.sigma * t.sinh()
    }

    fn scale(&self) -> f64 {
        self.sigma
    }
}

impl UnimodalDensity for TpSasParams {
    fn pdf(&self, x: f64) -> f64 {
        TpSasParams::pdf(self, x)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(TpSasParams::cdf(self, x))
    }

    fn search_interval(&self) -> Interval {
        let s = self.left_scale().max(self.right_scale());
        let lo = (self.quantile(SCAN_TAIL).expect("valid level") - self.mu) / s;
        let hi = (self.quantile(1.0 - SCAN_TAIL).expect("valid level") - self.mu) / s;
        asinh_scan(lo, hi)
    }

    fn scan_to_x(&self, t: f64) -> f64 {
        self.mu + self.left_scale().max(self.right_scale()) * t.sinh()
    }

    fn scale(&self) -> f64 {
        self.left_scale().min(self.right_scale())
    }

    fn known_mode(&self) -> Option<f64> {
        Some(self.mu)
    }
}

impl UnimodalDensity for SsSasParams {
    fn pdf(&self, x: f64) -> f64 {
        SsSasParams::pdf(self, x)
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        SsSasParams::cdf(self, x)
    }

    fn search_interval(&self) -> Interval {
        // |X - mu| / sigma has the law of |Z|, Z ~ f0, whatever lambda is
        let reach = SymmetricSas { delta: self.delta }
            .quantile(1.0 - SCAN_TAIL)
            .expect("valid level");
        asinh_scan(-reach, reach)
    }

    fn scan_to_x(&self, t: f64) -> f64 {
        self.mu + self.sigma * t.sinh()
    }

    fn scale(&self) -> f64 {
        self.sigma
    }
}

/// Location of the maximum of `d.pdf`.
///
/// A 2001-point pre-scan rejects densities with more than one strict local maximum;
/// ties go to the leftmost grid point. The grid winner is then refined as the zero
/// of the symmetric difference `f(x + h) - f(x - h)`, falling back to golden-section
/// search when that difference does not change sign across the grid cell.
pub fn find_mode<D: UnimodalDensity + ?Sized>(d: &D) -> Result<f64> {
    if let Some(m) = d.known_mode() {
        return Ok(m);
    }
    let scan = d.search_interval();
    let step = scan.width() / (SCAN_POINTS - 1) as f64;
    let ts: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| scan.lo + step * i as f64)
        .collect();
    let fs: Vec<f64> = ts.iter().map(|&t| d.pdf(d.scan_to_x(t))).collect();

    let maxima = count_local_maxima(&fs);
    if maxima > 1 {
        return Err(Error::Multimodal { count: maxima });
    }
    let best = fs
        .iter()
        .enumerate()
        .fold(0, |best, (i, &f)| if f > fs[best] { i } else { best });
    let lo = d.scan_to_x(ts[best.saturating_sub(1)]);
    let hi = d.scan_to_x(ts[(best + 1).min(SCAN_POINTS - 1)]);

    let h = 1e-4 * (hi - lo);
    let slope = |x: f64| d.pdf(x + h) - d.pdf(x - h);
    if best > 0 && best < SCAN_POINTS - 1 && slope(lo) > 0.0 && slope(hi) < 0.0 {
        let tol = 1e-3 * MODE_TOLERANCE * (1.0 + lo.abs().max(hi.abs()));
        return find_root(slope, Interval { lo, hi }, tol);
    }
    Ok(golden_section_max(
        |x| d.pdf(x),
        lo,
        hi,
        1e-3 * MODE_TOLERANCE,
    ))
}

fn count_local_maxima(fs: &[f64]) -> usize {
    // Values this far below the peak are rounding noise in the far tails
    // (subnormal wiggles), not genuine bumps; flatten them to zero.
    let peak = fs.iter().cloned().fold(0.0, f64::max);
    let floor = (peak * 1e-250).max(f64::MIN_POSITIVE);
    // collapse plateaus so a flat top counts once
    let mut levels: Vec<f64> = Vec::with_capacity(fs.len());
    for &f in fs {
        let f = if f < floor { 0.0 } else { f };
        if levels.last() != Some(&f) {
            levels.push(f);
        }
    }
    let n = levels.len();
    if n < 2 {
        return 1;
    }
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || levels[i] > levels[i - 1];
            let right_ok = i == n - 1 || levels[i] > levels[i + 1];
            left_ok && right_ok
        })
        .count()
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// AG skewness `1 - 2 F(mode)`.
pub fn ag_measure<D: UnimodalDensity + ?Sized>(d: &D) -> Result<f64> {
    let mode = find_mode(d)?;
    Ok(1.0 - 2.0 * d.cdf(mode)?)
}

/// CJ asymmetry at level `p`.
pub fn cj_functional<D: UnimodalDensity + ?Sized>(d: &D, p: f64) -> Result<f64> {
    let mode = find_mode(d)?;
    cj_at(d, mode, p)
}

/// Level crossings `(x_L, x_R)` where the density equals `p * f(mode)`.
pub fn level_crossings<D: UnimodalDensity + ?Sized>(
    d: &D,
    mode: f64,
    p: f64,
) -> Result<(f64, f64)> {
    crate::error::check_probability("p", p)?;
    let target = p * d.pdf(mode);
    let excess = |x: f64| d.pdf(x) - target;
    let scale = d.scale();
    let crossing = |direction: f64| -> Result<f64> {
        let bracket = expand_bracket(excess, mode, direction * scale, MAX_DOUBLINGS)?;
        let tol = CJ_ROOT_TOLERANCE * bracket.lo.abs().max(bracket.hi.abs()).max(1.0);
        find_root(excess, bracket, tol)
    };
    Ok((crossing(-1.0)?, crossing(1.0)?))
}

fn cj_at<D: UnimodalDensity + ?Sized>(d: &D, mode: f64, p: f64) -> Result<f64> {
    let (left, right) = level_crossings(d, mode, p)?;
    Ok((right - 2.0 * mode + left) / (right - left))
}

/// CJ evaluated along a grid of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct CjCurve {
    pub p_grid: Vec<f64>,
    pub cj_values: Vec<f64>,
}

pub fn cj_curve<D: UnimodalDensity + ?Sized>(d: &D, p_grid: &[f64]) -> Result<CjCurve> {
    let mode = find_mode(d)?;
    let cj_values = p_grid
        .iter()
        .map(|&p| cj_at(d, mode, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CjCurve {
        p_grid: p_grid.to_vec(),
        cj_values,
    })
}

/// Levels 0.01, 0.02, ..., 0.99.
pub fn default_p_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}
