use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{RateLabeling, ScenarioConfig};
use super::output::{CsvSeries, OutputBundle};
use crate::basin::{basin_pair_rates, evolve_mean_trotter, p1_closed_form, LandscapeModel, TwoStateRates};
use crate::error::{Error, Result};
use crate::oracle::{chi_square, mc_simulate, solve_dense_ode, spectral_match, TreeState};
use crate::padic::BallSpec;
use crate::rates::TemperatureSchedule;
use crate::spectral::{
    ball_mass, evolve_spectral, expand_ball_indicator, gamma_eigenvalue, SpectralOptions, SpectralState,
};

/// Slack allowed on `0 <= S <= 1` before it counts as a breach.
const UNIT_INTERVAL_SLACK: f64 = 1e-9;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Output bundle of a run together with the checks it performed.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub bundle: OutputBundle,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Two-state rates for the closed-form `p1` under the configured labeling.
pub fn labeled_rates(model: &LandscapeModel, labeling: RateLabeling) -> Result<TwoStateRates> {
    let r = basin_pair_rates(model)?;
    Ok(match labeling {
        RateLabeling::Physical => r,
        RateLabeling::Verbatim => TwoStateRates::new(r.loss, r.gain),
    })
}

/// Spectral states along `grid` starting from the normalized indicator of
/// `ball` at `grid[0]`.
pub fn spectral_trajectory(
    ball: &BallSpec,
    model: &LandscapeModel,
    grid: &[f64],
    opts: &SpectralOptions,
) -> Result<Vec<SpectralState>> {
    let mut state = expand_ball_indicator(ball, model.basin_count(), ball.prefix().len() + 1)?;
    state.time = grid[0];
    let mut out = Vec::with_capacity(grid.len());
    out.push(state.clone());
    for &t in &grid[1..] {
        state = evolve_spectral(&state, model, t, opts)?;
        out.push(state.clone());
    }
    Ok(out)
}

fn survival_series(states: &[SpectralState], ball: &BallSpec) -> Result<Vec<f64>> {
    states
        .iter()
        .map(|s| {
            let v = ball_mass(s, ball);
            if !(-UNIT_INTERVAL_SLACK..=1.0 + UNIT_INTERVAL_SLACK).contains(&v) {
                return Err(Error::Tolerance(format!("S({:e}) = {v} left [0, 1]", s.time)));
            }
            Ok(v)
        })
        .collect()
}

fn p1_trotter(model: &LandscapeModel, grid: &[f64], steps: usize) -> Result<Vec<f64>> {
    let mut u = DVector::from_vec(vec![1.0, 0.0]);
    let mut out = vec![1.0];
    for w in grid.windows(2) {
        u = evolve_mean_trotter(&u, model, w[0], w[1], steps)?.last().clone();
        out.push(u[0]);
    }
    Ok(out)
}

/// First time `S` drops below `level`, refined by bisection from the last
/// grid state above it.
fn crossing_time(
    states: &[SpectralState],
    s: &[f64],
    ball: &BallSpec,
    model: &LandscapeModel,
    opts: &SpectralOptions,
    level: f64,
) -> Result<Option<f64>> {
    let Some(i) = s.iter().position(|&v| v < level) else {
        return Ok(None);
    };
    if i == 0 {
        return Ok(Some(states[0].time));
    }
    let base = &states[i - 1];
    let (mut lo, mut hi) = (base.time, states[i].time);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ball_mass(&evolve_spectral(base, model, mid, opts)?, ball) < level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Largest residual of a least-squares fit of `values(t)` by
/// `Σ a_k exp(-rate_k (t - t0))`.
pub fn exponential_mixture_residual(times: &[f64], values: &[f64], rates: &[f64]) -> f64 {
    let t0 = times[0];
    let a = DMatrix::from_fn(times.len(), rates.len(), |r, c| (-rates[c] * (times[r] - t0)).exp());
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-14).expect("SVD with vectors");
    (a * x - b).amax()
}

/// Decay rates present in `S(t)` for an autonomous model: 0, the two-state
/// relaxation rate, and one `γ` per wavelet scale of the initial ball.
fn autonomous_rates(model: &LandscapeModel, ball: &BallSpec, opts: &SpectralOptions) -> Result<Vec<f64>> {
    let t = model.horizon().0;
    let mut rates = vec![0.0];
    if model.basin_count() == 2 {
        rates.push(basin_pair_rates(model)?.relaxation_rate(t));
    }
    let basin = ball.basin_index();
    for level in 0..ball.prefix().len() {
        let r = opts.convention.gamma_index(-(level as i32));
        rates.push(gamma_eigenvalue(model.p(), model.profile(basin), model.outflow(basin, t), r, t)?);
    }
    Ok(rates)
}

fn kelvin_label(k: f64) -> String {
    format!("{k}K")
}

#[derive(Debug, Clone, Serialize)]
struct GlassSummary {
    target_k: f64,
    crossing_time_s: Option<f64>,
    stationary_p1: f64,
    p1_end: f64,
    monotone_after_settle: bool,
}

fn glass_single(cfg: &ScenarioConfig, sched: &TemperatureSchedule, target_k: f64) -> Result<(GlassSummary, CsvSeries)> {
    let model = cfg.model_with_schedule(sched)?;
    let ball = cfg.initial()?;
    let grid = cfg.times()?;
    let opts = cfg.spectral_options();
    let rates = labeled_rates(&model, cfg.rate_labeling)?;
    let closed: Vec<f64> = p1_closed_form(&rates, &grid, &opts.quad)?.into_iter().map(|(_, p)| p).collect();
    let trotter = p1_trotter(&model, &grid, cfg.solver.trotter_steps)?;
    let states = spectral_trajectory(&ball, &model, &grid, &opts)?;
    let s = survival_series(&states, &ball)?;
    let crossing_time_s = crossing_time(&states, &s, &ball, &model, &opts, 0.5)?;

    let end = model.horizon().1;
    let (g, l) = (rates.gain.eval(end), rates.loss.eval(end));
    let stationary_p1 = g / (g + l);
    let settle = sched.settle_time();
    let gaps: Vec<f64> =
        grid.iter().zip(&closed).filter(|(t, _)| **t >= settle).map(|(_, p)| (p - stationary_p1).abs()).collect();
    let monotone_after_settle = gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);

    let mut series = CsvSeries::new(["t_s", "T_K", "p1_closed", "p1_trotter", "S"]);
    for i in 0..grid.len() {
        series.push(vec![grid[i], sched.at(grid[i]), closed[i], trotter[i], s[i]]);
    }
    let summary = GlassSummary {
        target_k,
        crossing_time_s,
        stationary_p1,
        p1_end: *closed.last().expect("grid is non-empty"),
        monotone_after_settle,
    };
    Ok((summary, series))
}

/// Glass cooling: for every quench depth, `T(t)`, `p1` (closed form and
/// product formula) and `S(t)`; plus constant-temperature control runs.
pub fn run_glass_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let horizon_end = cfg.horizon().1;
    let runs: Vec<(f64, TemperatureSchedule)> = match &cfg.glass_sweep {
        Some(sw) => sw
            .targets_k
            .iter()
            .map(|&target| {
                TemperatureSchedule::quench(sw.from_k, target, sw.tau_s, sw.cool_end_s, horizon_end)
                    .map(|s| (target, s))
                    .map_err(|e| Error::config("glass_sweep", e.to_string()))
            })
            .collect::<Result<_>>()?,
        None => vec![(cfg.schedule.at(horizon_end), cfg.schedule.clone())],
    };
    let results: Vec<(GlassSummary, CsvSeries)> =
        runs.par_iter().map(|(target, sched)| glass_single(cfg, sched, *target)).collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut summaries = Vec::new();
    for (summary, series) in results {
        checks.push(Check::new(
            format!("p1 converges monotonically after settling ({} K)", summary.target_k),
            summary.monotone_after_settle,
            format!("stationary p1 = {:e}, final p1 = {:e}", summary.stationary_p1, summary.p1_end),
        ));
        tables.push((format!("glass_T{}.csv", kelvin_label(summary.target_k)), series));
        summaries.push(summary);
    }
    let mut by_depth: Vec<&GlassSummary> = summaries.iter().collect();
    by_depth.sort_by(|a, b| b.target_k.total_cmp(&a.target_k));
    let delays: Vec<Option<f64>> = by_depth.iter().map(|s| s.crossing_time_s).collect();
    let ordered = delays.iter().all(Option::is_some)
        && delays.windows(2).all(|w| w[1].expect("checked") > w[0].expect("checked"));
    checks.push(Check::new("relaxation delay grows with quench depth", ordered, format!("{delays:?}")));

    let mut controls = Vec::new();
    for &kelvin in &cfg.control_temperatures_k {
        let sched = TemperatureSchedule::constant(kelvin, horizon_end)?;
        let model = cfg.model_with_schedule(&sched)?;
        let ball = cfg.initial()?;
        let grid = cfg.times()?;
        let opts = cfg.spectral_options();
        let s = survival_series(&spectral_trajectory(&ball, &model, &grid, &opts)?, &ball)?;
        let residual = exponential_mixture_residual(&grid, &s, &autonomous_rates(&model, &ball, &opts)?);
        checks.push(Check::new(
            format!("constant {kelvin} K control is an exponential mixture"),
            residual < 1e-6,
            format!("fit residual {residual:e}"),
        ));
        let mut series = CsvSeries::new(["t_s", "T_K", "S"]);
        for (t, v) in grid.iter().zip(&s) {
            series.push(vec![*t, kelvin, *v]);
        }
        tables.push((format!("glass_control_T{}.csv", kelvin_label(kelvin)), series));
        controls.push(json!({ "kelvin": kelvin, "fit_residual": residual }));
    }

    let summary = json!({ "runs": summaries, "controls": controls, "checks": checks });
    Ok(RunReport { bundle: OutputBundle { name: cfg.name.clone(), config: cfg.clone(), tables, summary }, checks })
}

/// First sign change of `f` on `grid`, refined by bisection.
fn bisect_sign_change(grid: &[f64], f: impl Fn(f64) -> f64) -> Option<f64> {
    let i = grid.windows(2).position(|w| f(w[0]).signum() != f(w[1]).signum())?;
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    let flo = f(lo).signum();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Protein folding under heating: rates and radial levels, constant-rate
/// controls, `p1(t)` and `S(t)`.
pub fn run_protein_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    if cfg.basins.len() != 2 {
        return Err(Error::config("basins", "protein scenario needs two basins"));
    }
    let model = cfg.model()?;
    let ball = cfg.initial()?;
    let grid = cfg.times()?;
    let opts = cfg.spectral_options();
    let sched = &cfg.schedule;
    let basin = ball.basin_index();
    let (kf, ku) = (|t: f64| model.rate(0, 1, t), |t: f64| model.rate(1, 0, t));

    let mut rates = CsvSeries::new(["t_s", "T_K", "k_f_hz", "k_u_hz", "w_level0_hz", "w_level1_hz"]);
    for &t in &grid {
        let prof = model.profile(basin);
        rates.push(vec![t, sched.at(t), kf(t), ku(t), prof.rate(0, t)?, prof.rate(1, t)?]);
    }
    let fine: Vec<f64> = {
        let (a, b) = cfg.horizon();
        (0..=1000).map(|k| a + (b - a) * k as f64 / 1000.0).collect()
    };
    let crossing_t = bisect_sign_change(&fine, |t| (kf(t) / ku(t)).ln());
    let crossing_k = crossing_t.map(|t| sched.at(t));
    let tm = cfg.protein_thermo.melting_k;

    let closed: Vec<f64> = p1_closed_form(&labeled_rates(&model, cfg.rate_labeling)?, &grid, &opts.quad)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let trotter = p1_trotter(&model, &grid, cfg.solver.trotter_steps)?;
    let states = spectral_trajectory(&ball, &model, &grid, &opts)?;
    let s = survival_series(&states, &ball)?;

    let mut p1 = CsvSeries::new(["t_s", "p1_closed", "p1_trotter", "one_minus_p1"]);
    let mut surv = CsvSeries::new(["t_s", "S"]);
    for i in 0..grid.len() {
        p1.push(vec![grid[i], closed[i], trotter[i], 1.0 - closed[i]]);
        surv.push(vec![grid[i], s[i]]);
    }
    let mut tables = vec![
        ("protein_rates.csv".to_string(), rates),
        ("protein_p1.csv".to_string(), p1),
        ("protein_S.csv".to_string(), surv),
    ];

    for &kelvin in &cfg.control_temperatures_k {
        let csched = TemperatureSchedule::constant(kelvin, cfg.horizon().1)?;
        let cmodel = cfg.model_with_schedule(&csched)?;
        let p = p1_closed_form(&labeled_rates(&cmodel, cfg.rate_labeling)?, &grid, &opts.quad)?;
        let mut series = CsvSeries::new(["t_s", "p1", "one_minus_p1"]);
        for (t, v) in p {
            series.push(vec![t, v, 1.0 - v]);
        }
        tables.push((format!("protein_control_T{}.csv", kelvin_label(kelvin)), series));
    }

    let (imin, pmin) =
        closed.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("grid is non-empty");
    let interior_min = imin > 0 && imin + 1 < closed.len() && closed[closed.len() - 1] > pmin + 1e-3;
    let s_end = *s.last().expect("grid is non-empty");
    let checks = vec![
        Check::new(
            "k_f and k_u cross near the melting temperature",
            crossing_k.is_some_and(|k| (k - tm).abs() <= 0.3),
            format!("crossing at t = {crossing_t:?} s, T = {crossing_k:?} K, T_m = {tm} K"),
        ),
        Check::new("S(0) = 1", (s[0] - 1.0).abs() <= 1e-14, format!("S(0) = {}", s[0])),
        Check::new("S(end) near 1/3", (s_end - 1.0 / 3.0).abs() <= 0.05, format!("S(end) = {s_end}")),
        Check::new("p1 has an interior minimum", interior_min, format!("min p1 = {pmin} at t = {} s", grid[imin])),
    ];
    let summary = json!({
        "crossing_time_s": crossing_t,
        "crossing_temperature_k": crossing_k,
        "melting_k": tm,
        "s_start": s[0],
        "s_end": s_end,
        "p1_min": pmin,
        "p1_min_time_s": grid[imin],
        "p1_end": closed[closed.len() - 1],
        "checks": checks,
    });
    Ok(RunReport { bundle: OutputBundle { name: cfg.name.clone(), config: cfg.clone(), tables, summary }, checks })
}

fn oracle_options(cfg: &ScenarioConfig) -> SpectralOptions {
    cfg.spectral_options().with_convention(cfg.oracle.eigenlevel_convention)
}

fn checkpoint_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    let (a, b) = cfg.horizon();
    let c = cfg.oracle.checkpoints;
    let mut out: Vec<f64> = (1..=c).map(|k| a + (b - a) * k as f64 / c as f64).collect();
    let mid = 0.5 * (a + b);
    if !out.iter().any(|&t| (t - mid).abs() <= 1e-12 * (b - a)) {
        out.push(mid);
        out.sort_by(f64::total_cmp);
    }
    out
}

/// Eigenvalue matching, spectral-vs-dense trajectories and (when
/// `oracle.paths > 0`) Monte Carlo consistency.
pub fn run_oracle_compare(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let model = cfg.model()?;
    let o = &cfg.oracle;
    let n = o.depth;
    let ball = cfg.initial()?;
    if ball.prefix().len() >= n {
        return Err(Error::config("oracle.depth", "must exceed the depth of the initial ball"));
    }
    let t0 = cfg.horizon().0;
    let mut checks = Vec::new();
    let mut tables = Vec::new();

    let eig = spectral_match(&model, n, t0, o.eigenlevel_convention, o.eigen_tol)?;
    checks.push(Check::new(
        "dense eigenvalues match the predicted spectrum",
        eig.passed(),
        format!("max relative error {:e} (tolerance {:e})", eig.max_rel_error, o.eigen_tol),
    ));
    let mut eig_table = CsvSeries::new([
        "predicted",
        "dense_re",
        "dense_im",
        "rel_error",
        "is_mean",
        "basin",
        "support_scale",
        "gamma_index",
    ]);
    for pair in &eig.pairs {
        let (mean, basin, scale, gamma) = match pair.source {
            crate::oracle::EigenSource::Mean => (1.0, -1.0, f64::NAN, f64::NAN),
            crate::oracle::EigenSource::Wavelet { basin, support_scale, gamma_index } => {
                (0.0, basin as f64, f64::from(support_scale), f64::from(gamma_index))
            }
        };
        eig_table.push(vec![pair.predicted, pair.dense_re, pair.dense_im, pair.rel_error, mean, basin, scale, gamma]);
    }
    tables.push(("oracle_eigen.csv".to_string(), eig_table));

    let opts = oracle_options(cfg);
    let grid = cfg.times()?;
    let u0 = TreeState::from_ball(&ball, model.basin_count(), n)?;
    let dense = solve_dense_ode(&u0, &model, &grid, o.dense_dt_s)?;
    let spectral = spectral_trajectory(&ball, &model, &grid, &opts)?;
    let mut traj = CsvSeries::new(["t_s", "max_density_error", "S_spectral", "S_dense"]);
    let mut max_err: f64 = 0.0;
    for (d, s) in dense.iter().zip(&spectral) {
        let sd = TreeState::from_spectral(s, model.p(), n)?;
        let err = sd.density().iter().zip(d.density()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_err = max_err.max(err);
        traj.push(vec![s.time, err, ball_mass(s, &ball), d.ball_mass(&ball)]);
    }
    checks.push(Check::new(
        "spectral density matches the dense solution",
        max_err <= o.trajectory_tol,
        format!("max pointwise density error {max_err:e} (tolerance {:e})", o.trajectory_tol),
    ));
    tables.push(("oracle_trajectory.csv".to_string(), traj));

    let mut mc_summary = serde_json::Value::Null;
    if o.paths > 0 {
        let checkpoints = checkpoint_grid(cfg);
        let mut dense_grid = vec![t0];
        dense_grid.extend(&checkpoints);
        let reference = solve_dense_ode(&u0, &model, &dense_grid, o.dense_dt_s)?;
        let occ = mc_simulate(&model, &ball, n, &checkpoints, o.paths, o.seed)?;
        let paths = o.paths as f64;
        // The check runs on the ball occupancy only; the basin series is
        // reported alongside it and would double the comparison count.
        let z = |f: f64, p: f64| (f - p).abs() / (p * (1.0 - p) / paths).sqrt().max(1.0 / paths);
        let mut worst: f64 = 0.0;
        let mut worst_basin: f64 = 0.0;
        let mut table = CsvSeries::new(["t_s", "ball_mc", "ball_dense", "ball_stderr", "basin0_mc", "basin0_dense"]);
        let ball_f = occ.ball_fraction(&ball);
        let basin_f = occ.basin_fraction(0);
        for (k, &t) in checkpoints.iter().enumerate() {
            let exact = &reference[k + 1];
            let (pb, p0) = (exact.ball_mass(&ball), exact.basin_mass(0));
            worst = worst.max(z(ball_f[k], pb));
            worst_basin = worst_basin.max(z(basin_f[k], p0));
            table.push(vec![t, ball_f[k], pb, (pb * (1.0 - pb) / paths).sqrt(), basin_f[k], p0]);
        }
        checks.push(Check::new(
            "Monte Carlo occupancy within binomial error",
            worst <= o.binomial_sigmas,
            format!("worst deviation {worst:.3} standard errors (limit {})", o.binomial_sigmas),
        ));
        let mid = 0.5 * (t0 + cfg.horizon().1);
        let k = checkpoints
            .iter()
            .position(|&t| (t - mid).abs() <= 1e-12 * (cfg.horizon().1 - t0))
            .expect("midpoint is a checkpoint");
        let chi = chi_square(&occ.counts[k], reference[k + 1].mass().as_slice())?;
        checks.push(Check::new(
            "leaf occupancy chi-square at mid-horizon",
            chi.passes(o.chi_square_significance),
            format!("statistic {:.3}, dof {}, p = {:.4}", chi.statistic, chi.dof, chi.p_value),
        ));
        tables.push(("oracle_mc.csv".to_string(), table));
        mc_summary = json!({
            "paths": o.paths,
            "seed": o.seed,
            "rng": occ.rng,
            "thinning_bound_hz": occ.thinning_bound,
            "worst_sigma": worst,
            "worst_sigma_basin0": worst_basin,
            "chi_square": chi,
        });
    }

    let summary = json!({
        "depth": n,
        "states": model.basin_count() * model.p().leaves(n),
        "eigen": {
            "convention": eig.convention,
            "detected_convention": eig.detected_convention(),
            "max_rel_error": eig.max_rel_error,
            "scale_mapping": eig.scale_mapping,
        },
        "trajectory_max_error": max_err,
        "monte_carlo": mc_summary,
        "checks": checks,
    });
    Ok(RunReport {
        bundle: OutputBundle { name: format!("{}_oracle", cfg.name), config: cfg.clone(), tables, summary },
        checks,
    })
}

/// Monte Carlo occupation of the initial ball and of every basin at the
/// oracle checkpoints, next to the spectral `S(t)`.
pub fn run_mc(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let model = cfg.model()?;
    let ball = cfg.initial()?;
    let o = &cfg.oracle;
    if o.paths == 0 {
        return Err(Error::config("oracle.paths", "must be at least 1"));
    }
    let n = o.depth.max(ball.prefix().len() + 1);
    let checkpoints = checkpoint_grid(cfg);
    let occ = mc_simulate(&model, &ball, n, &checkpoints, o.paths, o.seed)?;
    let mut grid = vec![cfg.horizon().0];
    grid.extend(&checkpoints);
    let spectral = spectral_trajectory(&ball, &model, &grid, &oracle_options(cfg))?;
    let paths = o.paths as f64;
    let mut cols = vec!["t_s".to_string(), "S_mc".into(), "S_stderr".into(), "S_spectral".into()];
    cols.extend(model.basins().iter().map(|b| format!("basin_{}_mc", b.label)));
    let mut table = CsvSeries::new(cols);
    let ball_f = occ.ball_fraction(&ball);
    let basin_f: Vec<Vec<f64>> = (0..model.basin_count()).map(|b| occ.basin_fraction(b)).collect();
    let mut worst: f64 = 0.0;
    for (k, &t) in checkpoints.iter().enumerate() {
        let f = ball_f[k];
        let exact = ball_mass(&spectral[k + 1], &ball);
        let se = (exact * (1.0 - exact) / paths).sqrt().max(1.0 / paths);
        worst = worst.max((f - exact).abs() / se);
        let mut row = vec![t, f, (f * (1.0 - f) / paths).sqrt(), exact];
        row.extend(basin_f.iter().map(|b| b[k]));
        table.push(row);
    }
    let checks = vec![Check::new(
        "Monte Carlo S(t) within binomial error of the spectral solution",
        worst <= o.binomial_sigmas,
        format!("worst deviation {worst:.3} standard errors"),
    )];
    let summary = json!({
        "paths": o.paths,
        "seed": o.seed,
        "rng": occ.rng,
        "depth": n,
        "thinning_bound_hz": occ.thinning_bound,
        "worst_sigma": worst,
        "checks": checks,
    });
    Ok(RunReport {
        bundle: OutputBundle {
            name: format!("{}_mc", cfg.name),
            config: cfg.clone(),
            tables: vec![("mc.csv".to_string(), table)],
            summary,
        },
        checks,
    })
}

/// Arbitrary model from the config: `S(t)` and basin occupations.
pub fn run_custom(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let model = cfg.model()?;
    let ball = cfg.initial()?;
    let grid = cfg.times()?;
    let states = spectral_trajectory(&ball, &model, &grid, &cfg.spectral_options())?;
    let s = survival_series(&states, &ball)?;
    let mut cols = vec!["t_s".to_string(), "T_K".into(), "S".into()];
    cols.extend(model.basins().iter().map(|b| format!("p_{}", b.label)));
    let mut table = CsvSeries::new(cols);
    let mut max_drift: f64 = 0.0;
    for (st, v) in states.iter().zip(&s) {
        max_drift = max_drift.max((st.mean.sum() - 1.0).abs());
        let mut row = vec![st.time, cfg.schedule.at(st.time), *v];
        row.extend(st.mean.iter());
        table.push(row);
    }
    let checks =
        vec![Check::new("basin probabilities sum to one", max_drift <= 1e-10, format!("max drift {max_drift:e}"))];
    let summary = json!({ "s_end": s.last(), "checks": checks });
    Ok(RunReport {
        bundle: OutputBundle {
            name: cfg.name.clone(),
            config: cfg.clone(),
            tables: vec![(format!("{}.csv", cfg.name), table)],
            summary,
        },
        checks,
    })
}
