use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::padic::{Prime, RadialProfile};
use crate::rates::{merged_breakpoints, RateFn};

/// One metabasin: a unit ball with its own radial intra-basin rate.
#[derive(Debug, Clone)]
pub struct Basin {
    pub label: String,
    pub profile: RadialProfile,
}

/// `N` metabasins, their radial profiles and the time-dependent inter-basin
/// rates, all on a finite horizon.
///
/// `inter[from][to]` is the jump rate (Hz) from any state of basin `from` to
/// basin `to`; rates need not be symmetric.
#[derive(Debug, Clone)]
pub struct LandscapeModel {
    p: Prime,
    basins: Vec<Basin>,
    inter: Vec<Vec<Option<RateFn>>>,
    horizon: (f64, f64),
}

const HORIZON_SLACK: f64 = 1e-12;

impl LandscapeModel {
    /// Model without inter-basin rates; add them with [`with_rate`](Self::with_rate).
    pub fn new(p: Prime, basins: Vec<Basin>, horizon: (f64, f64)) -> Result<Self> {
        if basins.is_empty() {
            return Err(Error::config("basins", "at least one basin is required"));
        }
        if !(horizon.1 > horizon.0) || !horizon.0.is_finite() || !horizon.1.is_finite() {
            return Err(Error::config("horizon", "must be a finite interval with end > start"));
        }
        let n = basins.len();
        Ok(Self { p, basins, inter: vec![vec![None; n]; n], horizon })
    }

    pub fn with_rate(mut self, from: usize, to: usize, rate: RateFn) -> Result<Self> {
        self.set_rate(from, to, rate)?;
        Ok(self)
    }

    pub fn set_rate(&mut self, from: usize, to: usize, rate: RateFn) -> Result<()> {
        let n = self.basins.len();
        if from >= n || to >= n || from == to {
            return Err(Error::config("inter", format!("invalid inter-basin pair {from} -> {to} for {n} basins")));
        }
        self.inter[from][to] = Some(rate);
        Ok(())
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn basins(&self) -> &[Basin] {
        &self.basins
    }

    pub fn basin_count(&self) -> usize {
        self.basins.len()
    }

    pub fn horizon(&self) -> (f64, f64) {
        self.horizon
    }

    pub fn profile(&self, basin: usize) -> &RadialProfile {
        &self.basins[basin].profile
    }

    pub fn rate_fn(&self, from: usize, to: usize) -> Option<&RateFn> {
        self.inter.get(from)?.get(to)?.as_ref()
    }

    /// Inter-basin rate `from -> to` at `t`; zero for absent pairs.
    pub fn rate(&self, from: usize, to: usize, t: f64) -> f64 {
        self.rate_fn(from, to).map_or(0.0, |f| f.eval(t))
    }

    /// Total rate of leaving basin `basin` for other basins.
    pub fn outflow(&self, basin: usize, t: f64) -> f64 {
        (0..self.basins.len()).filter(|&j| j != basin).map(|j| self.rate(basin, j, t)).sum()
    }

    /// The outflow of a basin as a single rate function.
    pub fn outflow_fn(&self, basin: usize) -> RateFn {
        let fns: Vec<RateFn> = self.inter[basin].iter().flatten().cloned().collect();
        let bp = merged_breakpoints(&fns);
        RateFn::new(move |t| fns.iter().map(|f| f.eval(t)).sum()).with_breakpoints(bp)
    }

    /// Breakpoints of every rate function in the model.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.inter.iter().flatten().flatten().flat_map(|f| f.breakpoints().to_vec()).collect();
        for b in &self.basins {
            all.extend(b.profile.breakpoints());
        }
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        let (a, b) = self.horizon;
        let slack = HORIZON_SLACK * (b - a).abs().max(1.0);
        if t < a - slack || t > b + slack || !t.is_finite() {
            return Err(Error::usage(format!("time {t:e} outside horizon [{a:e}, {b:e}]")));
        }
        Ok(())
    }

    /// Runtime check of positivity and continuity of every rate on the
    /// horizon. Profiles are probed through `depth` levels.
    pub fn validate(&self, depth: usize) -> Result<()> {
        let n = self.basins.len();
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                match &self.inter[from][to] {
                    None if n > 1 => {
                        return Err(Error::config(
                            format!("inter[{from}][{to}]"),
                            "every inter-basin rate must be specified",
                        ))
                    }
                    None => {}
                    Some(f) => self.check_rate_fn(f, &format!("inter[{from}][{to}]"), true)?,
                }
            }
        }
        for (i, b) in self.basins.iter().enumerate() {
            let levels = b.profile.level_fns(depth.max(1))?;
            for (m, f) in levels.iter().enumerate() {
                let strict = m < b.profile.levels().len();
                self.check_rate_fn(f, &format!("basins[{i}].levels[{m}]"), strict)?;
            }
        }
        Ok(())
    }

    fn check_rate_fn(&self, f: &RateFn, field: &str, strictly_positive: bool) -> Result<()> {
        let (a, b) = self.horizon;
        let span = b - a;
        let samples = 257;
        let mut times: Vec<f64> = (0..samples).map(|k| a + span * k as f64 / (samples - 1) as f64).collect();
        times.extend(f.breakpoints().iter().copied().filter(|&x| x >= a && x <= b));
        for &t in &times {
            let v = f.eval(t);
            let ok = v.is_finite() && if strictly_positive { v > 0.0 } else { v >= 0.0 };
            if !ok {
                return Err(Error::config(field, format!("rate {v:e} at t = {t:e} is not positive and finite")));
            }
        }
        let delta = 1e-9 * span;
        for &bp in f.breakpoints() {
            if bp - delta < a || bp + delta > b {
                continue;
            }
            let (l, r) = (f.eval(bp - delta), f.eval(bp + delta));
            if (l - r).abs() > 1e-4 * l.abs().max(r.abs()) {
                return Err(Error::config(field, format!("rate is discontinuous at t = {bp:e}: {l:e} vs {r:e}")));
            }
        }
        Ok(())
    }
}

/// Mean-sector generator `Q(t)`: `Q[to][from]` is the rate `from -> to` and
/// every column sums to zero. Acts on column vectors of basin occupations.
pub fn generator_matrix(model: &LandscapeModel, t: f64) -> Result<DMatrix<f64>> {
    model.check_time(t)?;
    Ok(generator_unchecked(model, t))
}

pub(crate) fn generator_unchecked(model: &LandscapeModel, t: f64) -> DMatrix<f64> {
    let n = model.basin_count();
    let mut q = DMatrix::zeros(n, n);
    for from in 0..n {
        let mut out = 0.0;
        for to in 0..n {
            if to != from {
                let r = model.rate(from, to, t);
                q[(to, from)] = r;
                out += r;
            }
        }
        q[(from, from)] = -out;
    }
    q
}

/// Stationary probability vector of the frozen generator `Q(t)`.
pub fn stationary_vector(model: &LandscapeModel, t: f64) -> Result<DVector<f64>> {
    let mut q = generator_matrix(model, t)?;
    let n = q.nrows();
    for j in 0..n {
        q[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    q.lu().solve(&rhs).ok_or_else(|| Error::Tolerance("generator has no unique stationary vector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::TailRule;

    fn two_basin(a: f64, b: f64) -> LandscapeModel {
        let p = Prime::new(3).unwrap();
        let prof = RadialProfile::constant_levels(&[1.0], TailRule::ConstantExtend).unwrap();
        let basins =
            vec![Basin { label: "U".into(), profile: prof.clone() }, Basin { label: "F".into(), profile: prof }];
        LandscapeModel::new(p, basins, (0.0, 1.0))
            .unwrap()
            .with_rate(0, 1, RateFn::constant(a))
            .unwrap()
            .with_rate(1, 0, RateFn::constant(b))
            .unwrap()
    }

    #[test]
    fn two_basin_generator() {
        let q = generator_matrix(&two_basin(2.0, 0.5), 0.3).unwrap();
        assert_eq!(q[(1, 0)], 2.0);
        assert_eq!(q[(0, 1)], 0.5);
        for j in 0..2 {
            assert_eq!(q.column(j).sum(), 0.0);
        }
    }

    #[test]
    fn single_basin_generator_is_zero() {
        let p = Prime::new(2).unwrap();
        let prof = RadialProfile::constant_levels(&[1.0], TailRule::ConstantExtend).unwrap();
        let m = LandscapeModel::new(p, vec![Basin { label: "A".into(), profile: prof }], (0.0, 1.0)).unwrap();
        let q = generator_matrix(&m, 0.5).unwrap();
        assert_eq!(q, DMatrix::zeros(1, 1));
        m.validate(3).unwrap();
    }

    #[test]
    fn outside_horizon_rejected() {
        assert!(generator_matrix(&two_basin(1.0, 1.0), 1.5).is_err());
        assert!(generator_matrix(&two_basin(1.0, 1.0), -0.1).is_err());
    }

    #[test]
    fn stationary_two_state() {
        let v = stationary_vector(&two_basin(2.0, 0.5), 0.0).unwrap();
        assert!((v[0] - 0.2).abs() < 1e-14);
        assert!((v[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn validation_catches_bad_rates() {
        let m = two_basin(1.0, 1.0);
        m.validate(2).unwrap();
        let mut bad = m.clone();
        bad.set_rate(0, 1, RateFn::new(|t| 1.0 - 2.0 * t)).unwrap();
        assert!(bad.validate(2).is_err());
        let mut jump = m.clone();
        jump.set_rate(0, 1, RateFn::new(|t| if t < 0.5 { 1.0 } else { 2.0 }).with_breakpoints(vec![0.5])).unwrap();
        assert!(jump.validate(2).is_err());
        let missing = LandscapeModel::new(m.p(), m.basins().to_vec(), (0.0, 1.0)).unwrap();
        assert!(missing.validate(2).is_err());
        assert!(m.clone().with_rate(0, 0, RateFn::constant(1.0)).is_err());
    }
}
