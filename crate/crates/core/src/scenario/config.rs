use serde::{Deserialize, Serialize};

use crate::basin::{Basin, LandscapeModel, MeanSolver};
use crate::error::{Error, Result};
use crate::padic::{BallSpec, Prime, RadialProfile, TailRule};
use crate::rates::{ArrheniusSpec, Energy, ProteinThermo, RateFn, TemperatureSchedule, ThermalConstant};
use crate::spectral::{EigenlevelConvention, SpectralOptions};

/// A rate as a function of the scenario's temperature schedule (or of time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateLaw {
    Constant {
        rate_hz: f64,
    },
    /// Linear in time across the horizon.
    Linear {
        start_hz: f64,
        end_hz: f64,
    },
    ArrheniusEv {
        prefactor_hz: f64,
        barrier_ev: f64,
    },
    ArrheniusMolar {
        prefactor_hz: f64,
        barrier_j_per_mol: f64,
    },
    ProteinFolding,
    ProteinUnfolding,
    /// `k_u(T(t))^exponent`, numerically in Hz.
    ProteinUnfoldingPower {
        exponent: f64,
    },
}

impl RateLaw {
    pub fn build(&self, sched: &TemperatureSchedule, thermo: &ProteinThermo, horizon: (f64, f64)) -> Result<RateFn> {
        Ok(match *self {
            RateLaw::Constant { rate_hz } => RateFn::constant(rate_hz),
            RateLaw::Linear { start_hz, end_hz } => {
                let (a, b) = horizon;
                RateFn::new(move |t| start_hz + (end_hz - start_hz) * ((t - a) / (b - a)).clamp(0.0, 1.0))
            }
            RateLaw::ArrheniusEv { prefactor_hz, barrier_ev } => {
                ArrheniusSpec::ev(prefactor_hz, barrier_ev)?.rate_fn(sched)
            }
            RateLaw::ArrheniusMolar { prefactor_hz, barrier_j_per_mol } => {
                ArrheniusSpec::new(prefactor_hz, Energy::JoulePerMole(barrier_j_per_mol), ThermalConstant::GasConstant)?
                    .rate_fn(sched)
            }
            RateLaw::ProteinFolding => thermo.folding_fn(sched),
            RateLaw::ProteinUnfolding => thermo.unfolding_fn(sched),
            RateLaw::ProteinUnfoldingPower { exponent } => thermo.unfolding_fn(sched).powf(exponent),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinConfig {
    pub label: String,
    /// `levels[m]` is the rate at distance `p^-m`.
    pub levels: Vec<RateLaw>,
    #[serde(default)]
    pub tail: TailRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterRate {
    pub from: usize,
    pub to: usize,
    pub rate: RateLaw,
}

/// The ball `B_{r0}` whose occupation is tracked. Its center is given by the
/// leading digits; `r0 = -center_digits.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBall {
    pub basin: usize,
    pub center_digits: Vec<u32>,
    pub r0: i32,
}

impl InitialBall {
    pub fn ball(&self, p: Prime) -> Result<BallSpec> {
        if self.r0 > 0 {
            return Err(Error::config("initial_ball.r0", "must be <= 0"));
        }
        let k = (-self.r0) as usize;
        if self.center_digits.len() < k {
            return Err(Error::config(
                "initial_ball.center_digits",
                format!("needs at least {k} digits for r0 = {}", self.r0),
            ));
        }
        BallSpec::new(p, self.basin, self.center_digits[..k].to_vec())
            .map_err(|e| Error::config("initial_ball.center_digits", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// `points` equally spaced times covering the horizon.
    Linear { points: usize },
    /// Horizon start, then `points` log-spaced times from `first_s` after the
    /// start up to the horizon end.
    Log { points: usize, first_s: f64 },
}

impl GridSpec {
    pub fn times(&self, horizon: (f64, f64)) -> Result<Vec<f64>> {
        let (a, b) = horizon;
        match *self {
            GridSpec::Linear { points } => {
                if points < 2 {
                    return Err(Error::config("grid.points", "need at least 2 points"));
                }
                Ok((0..points)
                    .map(|k| if k + 1 == points { b } else { a + (b - a) * k as f64 / (points - 1) as f64 })
                    .collect())
            }
            GridSpec::Log { points, first_s } => {
                if points < 2 {
                    return Err(Error::config("grid.points", "need at least 2 points"));
                }
                if !(first_s > 0.0 && first_s < b - a) {
                    return Err(Error::config("grid.first_s", "must lie strictly inside the horizon length"));
                }
                let (l0, l1) = (first_s.ln(), (b - a).ln());
                let mut out = vec![a];
                out.extend((0..points).map(|k| {
                    if k + 1 == points {
                        b
                    } else {
                        a + (l0 + (l1 - l0) * k as f64 / (points - 1) as f64).exp()
                    }
                }));
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethodChoice {
    #[default]
    ClosedForm,
    Trotter,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub quad_tol: f64,
    /// Product-formula factors per output interval.
    pub trotter_steps: usize,
    pub rk4_dt_s: f64,
    pub mean_method: MeanMethodChoice,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { quad_tol: 1e-10, trotter_steps: 64, rk4_dt_s: 1e-3, mean_method: MeanMethodChoice::ClosedForm }
    }
}

impl SolverConfig {
    pub fn mean_solver(&self) -> MeanSolver {
        match self.mean_method {
            MeanMethodChoice::ClosedForm => MeanSolver::ClosedForm { tol: self.quad_tol },
            MeanMethodChoice::Trotter => MeanSolver::Trotter { steps: self.trotter_steps },
            MeanMethodChoice::Rk4 => MeanSolver::Rk4 { dt_s: self.rk4_dt_s },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub depth: usize,
    pub dense_dt_s: f64,
    pub paths: usize,
    pub seed: u64,
    pub checkpoints: usize,
    /// Convention checked against the dense generator. Independent of the
    /// scenario convention so that figure reproduction and verification can
    /// differ.
    pub eigenlevel_convention: EigenlevelConvention,
    pub eigen_tol: f64,
    pub trajectory_tol: f64,
    pub chi_square_significance: f64,
    pub binomial_sigmas: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            depth: 3,
            dense_dt_s: 1e-3,
            paths: 100_000,
            seed: 20_240_917,
            checkpoints: 20,
            eigenlevel_convention: EigenlevelConvention::SupportScale,
            eigen_tol: 1e-8,
            trajectory_tol: 1e-5,
            chi_square_significance: 0.01,
            binomial_sigmas: 3.0,
        }
    }
}

/// Which population the closed-form `p1` formula tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateLabeling {
    /// `dp1/dt = W_{F->U} p2 - W_{U->F} p1`: `p1` is the occupation of basin 0.
    #[default]
    Physical,
    /// `dp1/dt = W_{U->F} p2 - W_{F->U} p1` with the symbols taken literally.
    Verbatim,
}

/// Quench-depth sweep for the glass scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlassSweep {
    pub from_k: f64,
    pub targets_k: Vec<f64>,
    pub tau_s: f64,
    pub cool_end_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub p: u32,
    pub horizon_s: [f64; 2],
    pub schedule: TemperatureSchedule,
    #[serde(default)]
    pub protein_thermo: ProteinThermo,
    pub basins: Vec<BasinConfig>,
    pub inter: Vec<InterRate>,
    pub initial_ball: InitialBall,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub eigenlevel_convention: EigenlevelConvention,
    #[serde(default)]
    pub rate_labeling: RateLabeling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glass_sweep: Option<GlassSweep>,
    /// Fixed temperatures for constant-rate control runs.
    #[serde(default)]
    pub control_temperatures_k: Vec<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn prime(&self) -> Result<Prime> {
        Prime::new(self.p).map_err(|_| Error::config("p", format!("{} is not a prime", self.p)))
    }

    pub fn horizon(&self) -> (f64, f64) {
        (self.horizon_s[0], self.horizon_s[1])
    }

    pub fn spectral_options(&self) -> SpectralOptions {
        SpectralOptions::new(self.solver.mean_solver())
            .with_convention(self.eigenlevel_convention)
            .with_tol(self.solver.quad_tol)
    }

    pub fn initial(&self) -> Result<BallSpec> {
        self.initial_ball.ball(self.prime()?)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.grid.times(self.horizon())
    }

    /// Field-level validation of everything that does not need a model.
    pub fn validate(&self) -> Result<()> {
        self.prime()?;
        let (a, b) = self.horizon();
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::config("horizon_s", "must be [start, end] with end > start"));
        }
        if self.basins.is_empty() {
            return Err(Error::config("basins", "at least one basin is required"));
        }
        for (i, basin) in self.basins.iter().enumerate() {
            if basin.levels.is_empty() {
                return Err(Error::config(format!("basins[{i}].levels"), "at least one level is required"));
            }
        }
        for (k, r) in self.inter.iter().enumerate() {
            if r.from >= self.basins.len() || r.to >= self.basins.len() || r.from == r.to {
                return Err(Error::config(format!("inter[{k}]"), "invalid basin pair"));
            }
        }
        if self.initial_ball.basin >= self.basins.len() {
            return Err(Error::config("initial_ball.basin", "no such basin"));
        }
        self.initial()?;
        self.times()?;
        let s = &self.solver;
        if !(s.quad_tol > 0.0) {
            return Err(Error::config("solver.quad_tol", "must be positive"));
        }
        if s.trotter_steps == 0 {
            return Err(Error::config("solver.trotter_steps", "must be at least 1"));
        }
        if !(s.rk4_dt_s > 0.0) {
            return Err(Error::config("solver.rk4_dt_s", "must be positive"));
        }
        if s.mean_method == MeanMethodChoice::ClosedForm && self.basins.len() != 2 {
            return Err(Error::config("solver.mean_method", "closed_form needs exactly two basins"));
        }
        let o = &self.oracle;
        if o.depth == 0 {
            return Err(Error::config("oracle.depth", "must be at least 1"));
        }
        if !(o.dense_dt_s > 0.0) {
            return Err(Error::config("oracle.dense_dt_s", "must be positive"));
        }
        if o.checkpoints == 0 {
            return Err(Error::config("oracle.checkpoints", "must be at least 1"));
        }
        if !(o.chi_square_significance > 0.0 && o.chi_square_significance < 1.0) {
            return Err(Error::config("oracle.chi_square_significance", "must lie in (0, 1)"));
        }
        if let Some(sweep) = &self.glass_sweep {
            if sweep.targets_k.is_empty() || sweep.targets_k.iter().any(|&t| !(t > 0.0)) {
                return Err(Error::config("glass_sweep.targets_k", "need positive temperatures"));
            }
            if !(sweep.cool_end_s > 0.0 && sweep.cool_end_s <= b - a) {
                return Err(Error::config("glass_sweep.cool_end_s", "must lie inside the horizon"));
            }
            if !(sweep.tau_s > 0.0) || !(sweep.from_k > 0.0) {
                return Err(Error::config("glass_sweep", "tau_s and from_k must be positive"));
            }
        }
        if self.control_temperatures_k.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::config("control_temperatures_k", "temperatures must be positive"));
        }
        Ok(())
    }

    /// Builds the model with the configured schedule.
    pub fn model(&self) -> Result<LandscapeModel> {
        self.model_with_schedule(&self.schedule)
    }

    pub fn model_with_schedule(&self, sched: &TemperatureSchedule) -> Result<LandscapeModel> {
        let p = self.prime()?;
        let horizon = self.horizon();
        let basins = self
            .basins
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let levels = b
                    .levels
                    .iter()
                    .map(|l| l.build(sched, &self.protein_thermo, horizon))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::config(format!("basins[{i}].levels"), e.to_string()))?;
                Ok(Basin { label: b.label.clone(), profile: RadialProfile::new(levels, b.tail)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut model = LandscapeModel::new(p, basins, horizon)?;
        for (k, r) in self.inter.iter().enumerate() {
            let f = r
                .rate
                .build(sched, &self.protein_thermo, horizon)
                .map_err(|e| Error::config(format!("inter[{k}].rate"), e.to_string()))?;
            model.set_rate(r.from, r.to, f)?;
        }
        model.validate(self.oracle.depth.max((-self.initial_ball.r0) as usize + 1))?;
        Ok(model)
    }

    /// Glass-cooling defaults: two Arrhenius basins at `p = 3`, `r0 = -1`,
    /// quenches from 300 K.
    pub fn glass_default() -> Self {
        let horizon = 1e-2;
        let cool_end = 1e-3;
        let tau = 1e-4;
        let levels = vec![
            RateLaw::ArrheniusEv { prefactor_hz: 1e12, barrier_ev: 0.4 },
            RateLaw::ArrheniusEv { prefactor_hz: 1e12, barrier_ev: 0.38 },
        ];
        Self {
            name: "glass".into(),
            p: 3,
            horizon_s: [0.0, horizon],
            schedule: TemperatureSchedule::quench(300.0, 200.0, tau, cool_end, horizon).expect("valid schedule"),
            protein_thermo: ProteinThermo::default(),
            basins: vec![
                BasinConfig { label: "U".into(), levels: levels.clone(), tail: TailRule::ConstantExtend },
                BasinConfig { label: "F".into(), levels, tail: TailRule::ConstantExtend },
            ],
            inter: vec![
                InterRate { from: 0, to: 1, rate: RateLaw::ArrheniusEv { prefactor_hz: 1e12, barrier_ev: 0.5 } },
                InterRate { from: 1, to: 0, rate: RateLaw::ArrheniusEv { prefactor_hz: 1e12, barrier_ev: 0.8 } },
            ],
            initial_ball: InitialBall { basin: 0, center_digits: vec![0], r0: -1 },
            grid: GridSpec::Log { points: 200, first_s: 1e-8 },
            solver: SolverConfig { trotter_steps: 16, rk4_dt_s: 1e-7, ..SolverConfig::default() },
            oracle: OracleConfig { depth: 3, dense_dt_s: 2.5e-7, paths: 10_000, ..OracleConfig::default() },
            eigenlevel_convention: EigenlevelConvention::Shifted,
            rate_labeling: RateLabeling::Physical,
            glass_sweep: Some(GlassSweep {
                from_k: 300.0,
                targets_k: vec![290.0, 260.0, 230.0, 200.0],
                tau_s: tau,
                cool_end_s: cool_end,
            }),
            control_temperatures_k: vec![300.0],
        }
    }

    /// Protein folding defaults: linear heating 35.85 °C -> 43 °C over 50 s,
    /// unfolded basin levels `k_u^0.25`, `k_u^0.5`.
    pub fn protein_default() -> Self {
        let horizon = 50.0;
        let levels =
            vec![RateLaw::ProteinUnfoldingPower { exponent: 0.25 }, RateLaw::ProteinUnfoldingPower { exponent: 0.5 }];
        Self {
            name: "protein".into(),
            p: 3,
            horizon_s: [0.0, horizon],
            schedule: TemperatureSchedule::linear(309.0, 316.15, horizon).expect("valid schedule"),
            protein_thermo: ProteinThermo::default(),
            basins: vec![
                BasinConfig { label: "U".into(), levels: levels.clone(), tail: TailRule::ConstantExtend },
                BasinConfig { label: "F".into(), levels, tail: TailRule::ConstantExtend },
            ],
            inter: vec![
                InterRate { from: 0, to: 1, rate: RateLaw::ProteinFolding },
                InterRate { from: 1, to: 0, rate: RateLaw::ProteinUnfolding },
            ],
            initial_ball: InitialBall { basin: 0, center_digits: vec![0], r0: -1 },
            grid: GridSpec::Linear { points: 501 },
            solver: SolverConfig { trotter_steps: 16, rk4_dt_s: 1e-2, ..SolverConfig::default() },
            oracle: OracleConfig { depth: 2, dense_dt_s: 1e-2, paths: 100_000, ..OracleConfig::default() },
            eigenlevel_convention: EigenlevelConvention::Shifted,
            rate_labeling: RateLabeling::Physical,
            glass_sweep: None,
            control_temperatures_k: vec![309.0, 316.15],
        }
    }
}
