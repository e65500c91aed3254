use super::Interval;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 400;

/// Root of `f` inside a sign-changing bracket.
///
/// Secant (false-position) steps are taken while they shrink the bracket by at
/// least half; otherwise the next step bisects. The returned point is the
/// bracket end with the smaller `|f|` once the bracket is narrower than `tol`.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Interval, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidBracket { lo, hi });
    }

    let mut bisect_next = false;
    for _ in 0..MAX_ITERATIONS {
        let width = hi - lo;
        if width <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let x = if bisect_next {
            mid
        } else {
            let secant = lo - f_lo * width / (f_hi - f_lo);
            if secant > lo && secant < hi {
                secant
            } else {
                mid
            }
        };
        if x <= lo || x >= hi {
            // bracket is at floating-point resolution
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_nan() {
            return Err(Error::InvalidInput(format!("function is NaN at {x}")));
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        bisect_next = hi - lo > 0.5 * width;
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Walks from `origin` in steps `step * 2^k` until `f` changes sign relative to
/// `f(origin)`, returning the last two probe points as an ordered bracket.
pub fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    origin: f64,
    step: f64,
    max_doublings: usize,
) -> Result<Interval> {
    let f0 = f(origin);
    if f0 == 0.0 {
        return Interval::new(origin.min(origin + step), origin.max(origin + step));
    }
    let mut inner = origin;
    let mut offset = step;
    for _ in 0..=max_doublings {
        let outer = origin + offset;
        let fo = f(outer);
        if fo == 0.0 || fo.signum() != f0.signum() {
            return Interval::new(inner.min(outer), inner.max(outer));
        }
        inner = outer;
        offset *= 2.0;
    }
    Err(Error::BracketGrowth {
        doublings: max_doublings,
    })
}
