//! Scalar numerics shared by every market model: bracketed bisection,
//! golden-section maximization, finite differences and quadrature.

use crate::error::{Error, Result};

/// Interval `[lo, hi]` expected to contain a sign change of the target map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Absolute tolerance on the argument.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

impl SolverSettings {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance > 0.0) || max_iterations == 0 {
            return Err(Error::domain(format!(
                "solver settings need tolerance > 0 and max_iterations >= 1, got {tolerance}, {max_iterations}"
            )));
        }
        Ok(Self {
            tolerance,
            max_iterations,
        })
    }

    /// Settings the equilibrium solvers use: bisect down to the last few ulps.
    pub(crate) fn equilibrium() -> Self {
        Self {
            tolerance: 1e-15,
            max_iterations: 200,
        }
    }
}

/// Bisection. Returns the midpoint of the final bracket once its width is at
/// most `settings.tolerance` (or cannot shrink further in `f64`).
pub fn find_root<F>(mut f: F, bracket: Bracket, settings: SolverSettings) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let Bracket { mut lo, mut hi } = bracket;
    let mut f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..settings.max_iterations {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= settings.tolerance || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.is_nan() {
            return Err(Error::Degenerate(format!("target map is NaN at {mid}")));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence {
        iterations: settings.max_iterations,
        last: lo + 0.5 * (hi - lo),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a concave map on `[lo, hi]`.
///
/// Returns `(argmax, max)`. Boundary maxima are recovered exactly because
/// both endpoints are compared against the final interior point.
pub fn maximize_concave<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    settings: SolverSettings,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!(
            "maximization interval [{lo}, {hi}] is empty"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while b - a > settings.tolerance {
        if iterations == settings.max_iterations {
            return Err(Error::Convergence {
                iterations,
                last: 0.5 * (a + b),
            });
        }
        iterations += 1;
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, f(mid)?);
    for x in [lo, hi] {
        let fx = f(x)?;
        if fx > best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}

/// `(f(x + h) - f(x - h)) / 2h`.
pub fn central_difference<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Second-order one-sided difference `(-3f(x) + 4f(x+h) - f(x+2h)) / 2h`,
/// for derivatives at the left edge of a domain.
pub fn forward_difference<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h))
}

/// Default finite-difference step `1e-6 · max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Adaptive Simpson quadrature of a smooth map on `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tolerance: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tolerance, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
