//! Bracketed scalar root finding: Illinois regula falsi with bisection steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Stopping rule: |f(x)| ≤ `f_tol`, or the bracket has shrunk below
/// `x_rel_tol` relative to its midpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub f_tol: f64,
    pub x_rel_tol: f64,
    pub max_iter: usize,
}

/// Find a root of `f` inside `[lo, hi]`, where `f_lo` and `f_hi` have opposite signs.
pub(crate) fn solve<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if f_lo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoConvergence(format!(
            "interval [{lo}, {hi}] does not bracket a sign change"
        )));
    }
    // side: which end was retained on the previous step (Illinois halving)
    let mut side = 0i8;
    for iteration in 1..=tol.max_iter {
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if iteration % 3 == 0 || !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence(format!("objective not finite at {x}")));
        }
        if fx.abs() <= tol.f_tol {
            return Ok(Root { x, fx, iterations: iteration });
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol.x_rel_tol * mid.abs() {
            return Ok(Root { x, fx, iterations: iteration });
        }
    }
    Err(Error::NoConvergence(format!(
        "no root within {} iterations (bracket [{lo}, {hi}])",
        tol.max_iter
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: Tolerance = Tolerance {
        f_tol: 0.0,
        x_rel_tol: 1e-14,
        max_iter: 200,
    };

    #[test]
    fn finds_sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let r = solve(f, 0.0, 2.0, f(0.0), f(2.0), TIGHT).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn handles_flat_convex_function() {
        let f = |x: f64| (x - 1e-3).powi(3) * 1e6 + (x - 1e-3);
        let r = solve(f, -10.0, 10.0, f(-10.0), f(10.0), TIGHT).unwrap();
        assert!((r.x - 1e-3).abs() < 1e-12);
        assert!(r.iterations < 200);
    }

    #[test]
    fn rejects_unbracketed_interval() {
        let f = |x: f64| x * x + 1.0;
        assert!(solve(f, -1.0, 1.0, f(-1.0), f(1.0), TIGHT).is_err());
    }
}
