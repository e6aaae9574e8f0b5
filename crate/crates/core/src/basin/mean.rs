use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::expm::expm;
use super::model::{generator_unchecked, LandscapeModel};
use super::two_state::TwoStateRates;
use crate::error::{Error, Result};
use crate::quad::Simpson;

/// Entries below this are treated as a failed step.
pub const NEGATIVE_ENTRY_LIMIT: f64 = -1e-9;
/// Sum drift above this triggers renormalization.
pub const DRIFT_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethod {
    Trotter,
    Rk4,
    ClosedForm2,
}

/// Basin occupations along a time grid.
#[derive(Debug, Clone)]
pub struct MeanEvolution {
    pub times: Vec<f64>,
    pub probabilities: Vec<DVector<f64>>,
    pub method: MeanMethod,
    /// Largest `|sum - 1|` seen before renormalization (RK4 only).
    pub max_drift: f64,
}

impl MeanEvolution {
    pub fn last(&self) -> &DVector<f64> {
        self.probabilities.last().expect("evolution holds the initial state")
    }

    /// Occupation of one basin along the grid.
    pub fn component(&self, basin: usize) -> Vec<(f64, f64)> {
        self.times.iter().zip(&self.probabilities).map(|(&t, v)| (t, v[basin])).collect()
    }
}

fn check_probability(u0: &DVector<f64>, n: usize) -> Result<()> {
    if u0.len() != n {
        return Err(Error::usage(format!("initial vector has length {}, model has {n} basins", u0.len())));
    }
    if u0.iter().any(|&x| !(x >= 0.0)) || (u0.sum() - 1.0).abs() > 1e-10 {
        return Err(Error::usage("initial vector is not a probability vector"));
    }
    Ok(())
}

fn check_interval(model: &LandscapeModel, s: f64, t: f64) -> Result<()> {
    model.check_time(s)?;
    model.check_time(t)?;
    if t < s {
        return Err(Error::usage(format!("evolution needs s <= t, got {s:e} > {t:e}")));
    }
    Ok(())
}

/// Ordered product of frozen-generator exponentials
/// `prod_{k=1..steps} exp(h Q(s + k h))`, `h = (t - s)/steps`, with factor
/// `k` applied after factor `k - 1`.
pub fn evolve_mean_trotter(
    u0: &DVector<f64>,
    model: &LandscapeModel,
    s: f64,
    t: f64,
    steps: usize,
) -> Result<MeanEvolution> {
    check_probability(u0, model.basin_count())?;
    check_interval(model, s, t)?;
    if steps == 0 {
        return Err(Error::usage("trotter steps must be at least 1"));
    }
    let h = (t - s) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut probabilities = Vec::with_capacity(steps + 1);
    let mut u = u0.clone();
    times.push(s);
    probabilities.push(u.clone());
    for k in 1..=steps {
        let tk = if k == steps { t } else { s + k as f64 * h };
        u = expm(&(generator_unchecked(model, tk) * h)) * u;
        times.push(tk);
        probabilities.push(u.clone());
    }
    Ok(MeanEvolution { times, probabilities, method: MeanMethod::Trotter, max_drift: 0.0 })
}

struct Rk4Stepper<'a> {
    model: &'a LandscapeModel,
}

impl Rk4Stepper<'_> {
    fn q(&self, t: f64) -> DMatrix<f64> {
        generator_unchecked(self.model, t)
    }

    fn step(&self, u: &DVector<f64>, t: f64, h: f64) -> DVector<f64> {
        let q0 = self.q(t);
        let qm = self.q(t + 0.5 * h);
        let q1 = self.q(t + h);
        let k1 = &q0 * u;
        let k2 = &qm * (u + &k1 * (0.5 * h));
        let k3 = &qm * (u + &k2 * (0.5 * h));
        let k4 = &q1 * (u + &k3 * h);
        u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }
}

/// Classical RK4 on `du/dt = Q(t) u` with uniform steps no larger than `dt`.
pub fn evolve_mean_rk4(u0: &DVector<f64>, model: &LandscapeModel, s: f64, t: f64, dt: f64) -> Result<MeanEvolution> {
    check_probability(u0, model.basin_count())?;
    check_interval(model, s, t)?;
    if !(dt > 0.0) {
        return Err(Error::usage("rk4 dt must be positive"));
    }
    let steps = (((t - s) / dt).ceil() as usize).max(1);
    let h = (t - s) / steps as f64;
    let stepper = Rk4Stepper { model };
    let mut times = Vec::with_capacity(steps + 1);
    let mut probabilities = Vec::with_capacity(steps + 1);
    let mut u = u0.clone();
    let mut max_drift: f64 = 0.0;
    times.push(s);
    probabilities.push(u.clone());
    for k in 0..steps {
        let tk = s + k as f64 * h;
        u = stepper.step(&u, tk, h);
        if let Some(&bad) = u.iter().find(|&&x| x < NEGATIVE_ENTRY_LIMIT) {
            return Err(Error::StepRejected { t: tk, dt: h, value: bad });
        }
        let drift = (u.sum() - 1.0).abs();
        max_drift = max_drift.max(drift);
        if drift > DRIFT_LIMIT {
            let total = u.sum();
            u /= total;
        }
        times.push(if k + 1 == steps { t } else { tk + h });
        probabilities.push(u.clone());
    }
    Ok(MeanEvolution { times, probabilities, method: MeanMethod::Rk4, max_drift })
}

/// Propagator for the mean sector between two times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MeanSolver {
    /// Product formula with a fixed number of factors per call.
    Trotter { steps: usize },
    /// RK4 with steps no larger than `dt_s`.
    Rk4 { dt_s: f64 },
    /// Integrating-factor closed form; two basins only.
    ClosedForm { tol: f64 },
}

impl MeanSolver {
    pub fn propagate(&self, model: &LandscapeModel, u: &DVector<f64>, s: f64, t: f64) -> Result<DVector<f64>> {
        if t == s {
            return Ok(u.clone());
        }
        match *self {
            MeanSolver::Trotter { steps } => Ok(evolve_mean_trotter(u, model, s, t, steps)?.last().clone()),
            MeanSolver::Rk4 { dt_s } => Ok(evolve_mean_rk4(u, model, s, t, dt_s)?.last().clone()),
            MeanSolver::ClosedForm { tol } => {
                if model.basin_count() != 2 {
                    return Err(Error::usage("closed-form mean solver needs exactly two basins"));
                }
                check_probability(u, 2)?;
                check_interval(model, s, t)?;
                let rates = basin_pair_rates(model)?;
                let p = rates.step(s, t, u[0], &Simpson::new(tol))?;
                Ok(DVector::from_vec(vec![p, 1.0 - p]))
            }
        }
    }
}

/// Two-state rates of basin 0 in a two-basin model: gain is `1 -> 0`,
/// loss is `0 -> 1`.
pub fn basin_pair_rates(model: &LandscapeModel) -> Result<TwoStateRates> {
    let (Some(gain), Some(loss)) = (model.rate_fn(1, 0), model.rate_fn(0, 1)) else {
        return Err(Error::usage("two-basin model is missing an inter-basin rate"));
    };
    Ok(TwoStateRates::new(gain.clone(), loss.clone()))
}
