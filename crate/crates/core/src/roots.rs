//! Scalar root finding shared by the closures: Newton steps safeguarded by a
//! bisection bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_iter: 100,
        }
    }
}

/// Find a root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
/// `f` returns the value and its derivative.
pub fn newton_bisect<F>(mut f: F, mut lo: f64, mut hi: f64, guess: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::NoBracket(format!(
            "f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}"
        )));
    }
    // orient so that f(lo) < 0 < f(hi)
    let increasing = f_lo < 0.0;

    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut dx_old = hi - lo;
    for _ in 0..opts.max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::Divergence(format!("non-finite residual at x = {x:e}")));
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let use_newton = dfx.is_finite()
            && dfx != 0.0
            && newton > lo
            && newton < hi
            && (newton - x).abs() < 0.5 * dx_old.abs();
        let next = if use_newton { newton } else { 0.5 * (lo + hi) };
        dx_old = next - x;
        let tol = opts.rel_tol * next.abs() + opts.abs_tol;
        x = next;
        if dx_old.abs() <= tol || (hi - lo).abs() <= tol {
            return Ok(x);
        }
    }
    Err(Error::Divergence(format!(
        "root not converged in {} iterations (bracket [{lo:e}, {hi:e}])",
        opts.max_iter
    )))
}

/// Double the distance above `lo` until `f` changes sign relative to `f(lo+)`.
/// `sign_at_lo` is the sign of `f` just above `lo`.
pub fn expand_upper<F>(mut f: F, lo: f64, start: f64, sign_at_lo: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut width = (start - lo).max(1e-300);
    for _ in 0..2100 {
        let hi = lo + width;
        let v = f(hi);
        if v == 0.0 || v.signum() != sign_at_lo {
            return Ok(hi);
        }
        width *= 2.0;
        if !width.is_finite() {
            break;
        }
    }
    Err(Error::NoBracket(format!("no sign change above {lo:e}")))
}
