use serde::{Deserialize, Serialize};

use super::address::Prime;
use crate::error::{Error, Result};
use crate::rates::RateFn;

/// How a radial profile extends past its deepest specified level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Deeper levels repeat the deepest given level.
    #[default]
    ConstantExtend,
    /// Deeper levels have rate zero.
    Zero,
    /// Deeper levels are undefined; querying them is a usage error.
    Truncate,
}

/// Intra-basin radial rate `w(|x - y|_p, t)`.
///
/// `levels[m]` is the rate at distance `p^-m` as a function of time.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    levels: Vec<RateFn>,
    tail: TailRule,
}

impl RadialProfile {
    pub fn new(levels: Vec<RateFn>, tail: TailRule) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::usage("radial profile needs at least one level"));
        }
        Ok(Self { levels, tail })
    }

    /// A time-independent profile from level values.
    pub fn constant_levels(values: &[f64], tail: TailRule) -> Result<Self> {
        Self::new(values.iter().map(|&v| RateFn::constant(v)).collect(), tail)
    }

    pub fn levels(&self) -> &[RateFn] {
        &self.levels
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// Rate at distance `p^-m`, time `t`.
    pub fn rate(&self, m: usize, t: f64) -> Result<f64> {
        match self.levels.get(m) {
            Some(f) => Ok(f.eval(t)),
            None => match self.tail {
                TailRule::ConstantExtend => Ok(self.levels[self.levels.len() - 1].eval(t)),
                TailRule::Zero => Ok(0.0),
                TailRule::Truncate => Err(Error::usage(format!(
                    "radial level {m} requested but profile defines only {} levels",
                    self.levels.len()
                ))),
            },
        }
    }

    /// Rate functions for levels `0..count`, applying the tail rule.
    pub fn level_fns(&self, count: usize) -> Result<Vec<RateFn>> {
        (0..count)
            .map(|m| match self.levels.get(m) {
                Some(f) => Ok(f.clone()),
                None => match self.tail {
                    TailRule::ConstantExtend => Ok(self.levels[self.levels.len() - 1].clone()),
                    TailRule::Zero => Ok(RateFn::constant(0.0)),
                    TailRule::Truncate => Err(Error::usage(format!(
                        "radial level {m} requested but profile defines only {} levels",
                        self.levels.len()
                    ))),
                },
            })
            .collect()
    }

    /// Breakpoints of all specified levels.
    pub fn breakpoints(&self) -> Vec<f64> {
        crate::rates::merged_breakpoints(&self.levels)
    }

    /// Haar-weighted shell sum `sum_{m=0}^{k} (p^-m - p^-m-1) w(p^-m, t)`.
    pub fn tail_integral(&self, p: Prime, k: usize, t: f64) -> Result<f64> {
        radial_tail_integral(self, p, k, t)
    }
}

/// `sum_{m=0}^{k} (p^-m - p^-m-1) w(p^-m, t)`: the integral of the radial rate
/// over the shells of `Z_p` at distances `1, p^-1, ..., p^-k`.
pub fn radial_tail_integral(profile: &RadialProfile, p: Prime, k: usize, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    for m in 0..=k {
        let m_i = m as i32;
        sum += (p.powi(-m_i) - p.powi(-m_i - 1)) * profile.rate(m, t)?;
    }
    Ok(sum)
}
