//! Adaptive composite Simpson quadrature.
//!
//! Time-dependent rates are smooth between schedule breakpoints but may have
//! kinks at them, so integration intervals are split at every breakpoint
//! before refinement starts.

use crate::error::{Error, Result};

/// Default relative tolerance for time integrals of rates.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Maximum bisection depth before reporting non-convergence.
pub const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson integrator with a tolerance relative to the magnitude of
/// the integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simpson {
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_TOL, max_depth: MAX_DEPTH }
    }
}

impl Simpson {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly
    /// inside the interval.
    pub fn integrate_with_breaks<F>(&self, f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::usage(format!("non-finite integration bounds [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return Ok(-self.integrate_with_breaks(f, b, a, breaks)?);
        }

        let mut nodes = Vec::with_capacity(breaks.len() + 2);
        nodes.push(a);
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        nodes.extend(inner);
        nodes.push(b);

        // Magnitude probe: composite Simpson of |f| on 16 panels per segment.
        let magnitude: f64 = nodes.windows(2).map(|w| composite_abs(&f, w[0], w[1], 16)).sum();
        if !magnitude.is_finite() {
            return Err(Error::Tolerance(format!("integrand is not finite on [{a:e}, {b:e}]")));
        }
        if magnitude == 0.0 {
            return Ok(0.0);
        }
        let abs_tol = self.rel_tol * magnitude;
        let total = b - a;

        let mut sum = 0.0;
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let tol = abs_tol * (hi - lo) / total;
            let fa = f(lo);
            let fb = f(hi);
            let m = 0.5 * (lo + hi);
            let fm = f(m);
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            sum += self.refine(&f, lo, hi, fa, fm, fb, whole, tol, 0)?;
        }
        Ok(sum)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64>
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
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: left + right,
                error: delta.abs() / 15.0,
                tolerance: tol,
                depth,
            });
        }
        Ok(self.refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + self.refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
    }
}

fn composite_abs<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let x0 = a + k as f64 * h;
            let x1 = x0 + h;
            h / 6.0 * (f(x0).abs() + 4.0 * f(0.5 * (x0 + x1)).abs() + f(x1).abs())
        })
        .sum()
}

/// Composite trapezoid rule on `panels` uniform panels. Used as an
/// independent reference in tests and oracle comparisons.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let interior: f64 = (1..panels).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + interior)
}
