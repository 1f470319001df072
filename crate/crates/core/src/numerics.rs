//! Real branches of the Lambert W function and a bisection root finder.
//!
//! `lambert_w0` and `lambert_wm1` invert `w * exp(w)` on the two real
//! branches. Both start from an analytic guess (branch-point series close to
//! `-1/e`, asymptotic logarithms elsewhere) and polish it with Halley steps
//! until the update stalls at machine precision.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Smallest real argument of either branch, `-exp(-1)`.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;

/// Arguments this far below the branch point are treated as sitting on it.
pub const BRANCH_CLAMP: f64 = 1e-15;

const MAX_ITERATIONS: usize = 50;

/// Principal branch `W0`, defined for `x >= -1/e`, with `W0(x) >= -1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite("lambert_w0 argument"));
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x < BRANCH_POINT - BRANCH_CLAMP {
        return Err(Error::Domain {
            function: "lambert_w0",
            value: x,
        });
    }
    if x <= BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let guess = if x < -0.32 {
        branch_point_series(x, 1.0)
    } else {
        // Winitzki's approximation, good to about 1% on (-0.32, inf).
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    Ok(halley(x, guess).max(-1.0))
}

/// Secondary branch `W-1`, defined for `-1/e <= x < 0`, with `W-1(x) <= -1`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite("lambert_wm1 argument"));
    }
    if !(BRANCH_POINT - BRANCH_CLAMP..0.0).contains(&x) {
        return Err(Error::Domain {
            function: "lambert_wm1",
            value: x,
        });
    }
    if x <= BRANCH_POINT {
        return Ok(-1.0);
    }

    let guess = if x < -0.25 {
        branch_point_series(x, -1.0)
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess).min(-1.0))
}

/// `W-1(-exp(l))` for `l <= -1`. Takes the logarithm of `-x` so that
/// arguments below the smallest normal `f64` keep full relative precision.
pub fn lambert_wm1_from_log(l: f64) -> Result<f64> {
    if l.is_nan() {
        return Err(Error::NonFinite("lambert_wm1_from_log argument"));
    }
    if l == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if l > -700.0 {
        return lambert_wm1(-l.exp());
    }
    // Newton on w + ln(-w) = l; the slope 1 + 1/w is close to 1 here.
    let mut w = l - (-l).ln();
    for _ in 0..MAX_ITERATIONS {
        let step = (w + (-w).ln() - l) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// Series around the branch point; `sign = +1` selects W0, `-1` selects W-1.
fn branch_point_series(x: f64, sign: f64) -> f64 {
    let p = sign * (2.0 * (E * x + 1.0)).max(0.0).sqrt();
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Bisection on a sign-changing bracket. Returns the midpoint of the final
/// bracket once its width is at most `tol` (or cannot shrink further).
pub fn solve_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::invalid(
            "bracket",
            format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"),
        ));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::NonFinite("bracket endpoint evaluation"));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }

    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if !f_mid.is_finite() {
            return Err(Error::NonFinite("bracket interior evaluation"));
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}
