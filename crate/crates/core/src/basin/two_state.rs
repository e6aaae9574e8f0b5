//! Two-basin closed forms for `dp/dt = gain(t) (1 - p) - loss(t) p`, where
//! `p` is the occupation of the first basin.

use crate::error::{Error, Result};
use crate::quad::Simpson;
use crate::rates::{merged_breakpoints, RateFn};

/// Rates of a two-state system seen from the first state.
#[derive(Debug, Clone)]
pub struct TwoStateRates {
    /// Rate into the first state from the second.
    pub gain: RateFn,
    /// Rate out of the first state into the second.
    pub loss: RateFn,
}

impl TwoStateRates {
    pub fn new(gain: RateFn, loss: RateFn) -> Self {
        Self { gain, loss }
    }

    pub fn relaxation_rate(&self, t: f64) -> f64 {
        self.gain.eval(t) + self.loss.eval(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        merged_breakpoints([&self.gain, &self.loss])
    }

    /// `p(t)` given `p(s)`, by the integrating-factor solution
    /// `p(t) = p(s) e^{-L(s,t)} + int_s^t e^{-L(tau,t)} gain(tau) dtau`
    /// with `L(a,b) = int_a^b (gain + loss)`, evaluated by nested adaptive
    /// quadrature.
    pub fn step(&self, s: f64, t: f64, p_s: f64, quad: &Simpson) -> Result<f64> {
        if t < s {
            return Err(Error::usage(format!("two-state step needs s <= t, got {s:e} > {t:e}")));
        }
        if t == s {
            return Ok(p_s);
        }
        let bp = self.breakpoints();
        let lambda = |x: f64| self.relaxation_rate(x);
        let total = quad.integrate_with_breaks(lambda, s, t, &bp)?;

        // The inner integral is a partial of `total`; failures inside the
        // outer integrand are surfaced after the fact.
        let inner_err = std::cell::RefCell::new(None);
        let integrand = |tau: f64| {
            if tau >= t {
                return self.gain.eval(tau);
            }
            match quad.integrate_with_breaks(lambda, tau, t, &bp) {
                Ok(l) => (-l).exp() * self.gain.eval(tau),
                Err(e) => {
                    inner_err.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let source = quad.integrate_with_breaks(integrand, s, t, &bp)?;
        if let Some(e) = inner_err.into_inner() {
            return Err(e);
        }
        Ok(p_s * (-total).exp() + source)
    }
}

/// First-basin occupation along `grid`, starting from `p = 1` at `grid[0]`.
pub fn p1_closed_form(rates: &TwoStateRates, grid: &[f64], quad: &Simpson) -> Result<Vec<(f64, f64)>> {
    check_grid(grid)?;
    let mut out = Vec::with_capacity(grid.len());
    let mut p = 1.0;
    out.push((grid[0], p));
    for w in grid.windows(2) {
        p = rates.step(w[0], w[1], p, quad)?;
        out.push((w[1], p));
    }
    Ok(out)
}

/// Piecewise frozen-rate evolution: on each cell `[a_i, a_{i+1}]` the rates
/// are frozen at `a_i` and `p` relaxes exactly toward `gain/(gain+loss)`;
/// cell endpoints chain as initial conditions. Starts from `p = 1`.
pub fn p1_taylor_piecewise(rates: &TwoStateRates, partition: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_grid(partition)?;
    let mut out = Vec::with_capacity(partition.len());
    let mut p = 1.0;
    out.push((partition[0], p));
    for w in partition.windows(2) {
        let (a, b) = (w[0], w[1]);
        let gain = rates.gain.eval(a);
        let lambda = gain + rates.loss.eval(a);
        if lambda > 0.0 {
            let decay = (-lambda * (b - a)).exp();
            p = p * decay + gain / lambda * (1.0 - decay);
        }
        out.push((b, p));
    }
    Ok(out)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::usage("time grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::usage("time grid must be strictly increasing"));
    }
    Ok(())
}
