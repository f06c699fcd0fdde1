use crate::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 400;

fn check_bracket(lo: f64, hi: f64, g_lo: f64, g_hi: f64) -> Result<()> {
    if !(lo < hi) || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::invalid(
            "root bracket must satisfy lo < hi and g must not be NaN",
        ));
    }
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    Ok(())
}

fn converged(mid: f64, g_mid: f64, width: f64, tol: f64) -> bool {
    g_mid.abs() <= tol || width <= tol * (1.0 + mid.abs())
}

/// Root of a continuous scalar function on a sign-changing bracket by
/// bisection.
///
/// Stops when `|g(μ)| ≤ tol` or the bracket is narrower than `tol·(1+|μ|)`.
pub fn solve_scalar_root<F: FnMut(f64) -> f64>(
    mut g: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    solve_scalar_root_with_derivative(|x| (g(x), f64::NAN), lo, hi, tol)
}

/// Safeguarded Newton iteration: `g` returns `(g(μ), g'(μ))`; a Newton step
/// is taken only when it lands strictly inside the current bracket,
/// otherwise the bracket is bisected. A NaN derivative disables Newton.
pub fn solve_scalar_root_with_derivative<F: FnMut(f64) -> (f64, f64)>(
    mut g: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (g_a, _) = g(a);
    let (g_b, _) = g(b);
    check_bracket(a, b, g_a, g_b)?;
    if g_a == 0.0 {
        return Ok(a);
    }
    if g_b == 0.0 {
        return Ok(b);
    }
    let a_negative = g_a < 0.0;

    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITERATIONS {
        let (gx, dgx) = g(x);
        if gx == 0.0 || converged(x, gx, b - a, tol) {
            return Ok(x);
        }
        if (gx < 0.0) == a_negative {
            a = x;
        } else {
            b = x;
        }
        let newton = x - gx / dgx;
        x = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            // Bracket collapsed to adjacent floats.
            return Ok(x);
        }
    }
    Err(Error::NotConverged("scalar root finder"))
}
