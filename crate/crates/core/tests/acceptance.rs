//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the report reads top to bottom.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use padic_kinetics::basin::{evolve_mean_rk4, evolve_mean_trotter, p1_closed_form, Basin, TwoStateRates};
use padic_kinetics::oracle::{chi_square, mc_simulate, solve_dense_ode, spectral_match, EigenSource, TreeState};
use padic_kinetics::padic::{BallSpec, Prime, RadialProfile, TailRule};
use padic_kinetics::rates::RateFn;
use padic_kinetics::scenario::{run_glass_scenario, run_protein_scenario, spectral_trajectory, ScenarioConfig};
use padic_kinetics::spectral::{
    ball_mass, expand_ball_indicator, reconstruct_density, EigenlevelConvention, SpectralOptions,
};
use padic_kinetics::{LandscapeModel, MeanSolver, Simpson};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_model(rng: &mut ChaCha8Rng, p: Prime, n: usize, basins: usize) -> LandscapeModel {
    let bs = (0..basins)
        .map(|i| {
            let levels: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
            Basin {
                label: format!("B{i}"),
                profile: RadialProfile::constant_levels(&levels, TailRule::ConstantExtend).unwrap(),
            }
        })
        .collect();
    let mut m = LandscapeModel::new(p, bs, (0.0, 1.0)).unwrap();
    for from in 0..basins {
        for to in 0..basins {
            if from != to {
                m.set_rate(from, to, RateFn::constant(rng.random_range(0.1..3.0))).unwrap();
            }
        }
    }
    m
}

fn ac1_eigenvalues() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for p in [2, 3] {
        let prime = Prime::new(p).unwrap();
        for n in [2, 3] {
            for basins in [1, 2] {
                for _ in 0..3 {
                    let m = random_model(&mut rng, prime, n, basins);
                    let r = spectral_match(&m, n, 0.0, EigenlevelConvention::SupportScale, 1e-8)
                        .map_err(|e| e.to_string())?;
                    ensure(r.passed(), || format!("p={p} n={n} N={basins}: max rel error {:e}", r.max_rel_error))?;
                    ensure(r.pairs.len() == basins * prime.leaves(n), || "eigenvalue count".into())?;
                    for b in 0..basins {
                        for level in 0..n {
                            let count = r
                                .pairs
                                .iter()
                                .filter(|q| {
                                    matches!(q.source, EigenSource::Wavelet { basin, support_scale, .. }
                                        if basin == b && support_scale == -(level as i32))
                                })
                                .count();
                            let expected = (p as usize - 1) * prime.leaves(level);
                            ensure(count == expected, || format!("multiplicity {count} != {expected}"))?;
                        }
                    }
                    worst = worst.max(r.max_rel_error);
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} random models, max relative error {worst:.2e}"))
}

fn ac2_trajectory() -> Outcome {
    let cfg = ScenarioConfig::glass_default();
    let model = cfg.model().map_err(|e| e.to_string())?;
    let ball = cfg.initial().unwrap();
    let n = 3;
    let grid = cfg.times().unwrap();
    let opts = SpectralOptions::new(MeanSolver::ClosedForm { tol: 1e-10 })
        .with_convention(EigenlevelConvention::SupportScale)
        .with_tol(1e-10);
    let spectral = spectral_trajectory(&ball, &model, &grid, &opts).map_err(|e| e.to_string())?;
    let u0 = TreeState::from_ball(&ball, 2, n).unwrap();
    let dense = solve_dense_ode(&u0, &model, &grid, 2.5e-7).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (s, d) in spectral.iter().zip(&dense) {
        let sd = TreeState::from_spectral(s, model.p(), n).unwrap();
        for (a, b) in sd.density().iter().zip(d.density()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-5, || format!("max density error {worst:e}"))?;
    Ok(format!("G_3, {} grid times, max density error {worst:.2e}", grid.len()))
}

fn ac3_trotter() -> Outcome {
    let model = ScenarioConfig::protein_default().model().map_err(|e| e.to_string())?;
    let u0 = DVector::from_vec(vec![1.0, 0.0]);
    let reference = evolve_mean_rk4(&u0, &model, 0.0, 50.0, 1e-3).map_err(|e| e.to_string())?;
    let exact = reference.last()[0];
    let steps = [256, 512, 1024, 2048, 4096];
    let errors: Vec<f64> = steps
        .iter()
        .map(|&s| (evolve_mean_trotter(&u0, &model, 0.0, 50.0, s).unwrap().last()[0] - exact).abs())
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|r| (1.6..=2.4).contains(r)), || format!("ratios {ratios:?}"))?;
    Ok(format!(
        "errors {:.2e}..{:.2e}, ratios {}",
        errors[0],
        errors[4],
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" ")
    ))
}

fn ac4_two_basin() -> Outcome {
    let (a, b) = (0.7, 1.9);
    let grid: Vec<f64> = (0..=200).map(|k| 0.025 * k as f64).collect();
    let quad = Simpson::new(1e-12);
    let rates = TwoStateRates::new(RateFn::constant(a), RateFn::constant(b));
    let cf = p1_closed_form(&rates, &grid, &quad).map_err(|e| e.to_string())?;
    let eq = a / (a + b);
    let const_err = cf.iter().map(|&(t, p)| (p - (eq + (1.0 - eq) * (-(a + b) * t).exp())).abs()).fold(0.0, f64::max);
    ensure(const_err <= 1e-10, || format!("constant-rate error {const_err:e}"))?;

    let model = ScenarioConfig::protein_default().model().map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=100).map(|k| 0.5 * k as f64).collect();
    let tr = padic_kinetics::basin::basin_pair_rates(&model).unwrap();
    let cf = p1_closed_form(&tr, &grid, &quad).map_err(|e| e.to_string())?;
    let u0 = DVector::from_vec(vec![1.0, 0.0]);
    let mut u = u0.clone();
    let mut td_err: f64 = 0.0;
    let mut sum_err: f64 = 0.0;
    for (w, &(_, p)) in grid.windows(2).zip(&cf[1..]) {
        let ev = evolve_mean_rk4(&u, &model, w[0], w[1], 1e-3).map_err(|e| e.to_string())?;
        u = ev.last().clone();
        td_err = td_err.max((u[0] - p).abs());
        sum_err = sum_err.max((u.sum() - 1.0).abs());
        let tro = evolve_mean_trotter(&u0, &model, 0.0, w[1], 64).unwrap();
        sum_err = sum_err.max((tro.last().sum() - 1.0).abs());
    }
    ensure(td_err <= 1e-7, || format!("time-dependent error {td_err:e}"))?;
    ensure(sum_err <= 1e-10, || format!("p1 + p2 drift {sum_err:e}"))?;
    Ok(format!("constant {const_err:.1e}, time-dependent vs RK4 {td_err:.1e}, p1+p2 drift {sum_err:.1e}"))
}

fn ac5_protein() -> Outcome {
    let report = run_protein_scenario(&ScenarioConfig::protein_default()).map_err(|e| e.to_string())?;
    let s = report.bundle.table("protein_S.csv").unwrap().column("S").unwrap();
    ensure(s[0] == 1.0, || format!("S(0) = {}", s[0]))?;
    for c in &report.checks {
        ensure(c.passed, || format!("{}: {}", c.name, c.detail))?;
    }
    let sum = &report.bundle.summary;
    Ok(format!(
        "crossing {:.3} K, S(50 s) = {:.4}, p1 min {:.4} at {} s",
        sum["crossing_temperature_k"].as_f64().unwrap(),
        sum["s_end"].as_f64().unwrap(),
        sum["p1_min"].as_f64().unwrap(),
        sum["p1_min_time_s"]
    ))
}

fn ac6_glass() -> Outcome {
    let report = run_glass_scenario(&ScenarioConfig::glass_default()).map_err(|e| e.to_string())?;
    for c in &report.checks {
        ensure(c.passed, || format!("{}: {}", c.name, c.detail))?;
    }
    let delays: Vec<String> = report.bundle.summary["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| format!("{}K:{:.3e}s", r["target_k"], r["crossing_time_s"].as_f64().unwrap()))
        .collect();
    Ok(format!("S < 0.5 at {}", delays.join(" ")))
}

fn ac7_monte_carlo() -> Outcome {
    let prime = Prime::new(3).unwrap();
    let (a, b) = (0.6, 0.3);
    let prof = RadialProfile::constant_levels(&[1.5, 0.8], TailRule::ConstantExtend).unwrap();
    let model = LandscapeModel::new(
        prime,
        vec![Basin { label: "U".into(), profile: prof.clone() }, Basin { label: "F".into(), profile: prof }],
        (0.0, 6.0),
    )
    .unwrap()
    .with_rate(0, 1, RateFn::constant(a))
    .unwrap()
    .with_rate(1, 0, RateFn::constant(b))
    .unwrap();
    let ball = BallSpec::new(prime, 0, vec![1]).unwrap();
    let n = 2;
    let paths = 100_000;
    let checkpoints: Vec<f64> = (1..=20).map(|k| 0.3 * k as f64).collect();
    let occ = mc_simulate(&model, &ball, n, &checkpoints, paths, 7).map_err(|e| e.to_string())?;

    let mut grid = vec![0.0];
    grid.extend(&checkpoints);
    let rates = TwoStateRates::new(RateFn::constant(b), RateFn::constant(a));
    let p1 = p1_closed_form(&rates, &grid, &Simpson::default()).unwrap();
    let mut worst: f64 = 0.0;
    for (f, &(_, p)) in occ.basin_fraction(0).iter().zip(&p1[1..]) {
        worst = worst.max((f - p).abs() / (p * (1.0 - p) / paths as f64).sqrt());
    }
    ensure(worst <= 3.0, || format!("worst deviation {worst:.2} standard errors"))?;

    let u0 = TreeState::from_ball(&ball, 2, n).unwrap();
    let dense = solve_dense_ode(&u0, &model, &grid, 1e-3).unwrap();
    let mid = checkpoints.iter().position(|&t| (t - 3.0).abs() < 1e-12).unwrap();
    let chi = chi_square(&occ.counts[mid], dense[mid + 1].mass().as_slice()).unwrap();
    ensure(chi.passes(0.01), || format!("chi-square p = {}", chi.p_value))?;

    let again = mc_simulate(&model, &ball, n, &checkpoints, paths, 7).unwrap();
    let bytes = |o: &padic_kinetics::oracle::McOccupation| serde_json::to_vec(o).unwrap();
    ensure(bytes(&occ) == bytes(&again), || "seeded reruns differ".into())?;
    Ok(format!(
        "worst {worst:.2} SE over 20 checkpoints, chi-square p = {:.3} (dof {}), reruns identical",
        chi.p_value, chi.dof
    ))
}

fn ac8_parseval() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [2, 3] {
        let prime = Prime::new(p).unwrap();
        for r0 in [-1i32, -2] {
            let k = (-r0) as usize;
            for idx in 0..prime.leaves(k) {
                let center = padic_kinetics::TreeAddress::from_leaf_index(prime, 0, k, idx);
                let ball = BallSpec::new(prime, 0, center.digits().to_vec()).unwrap();
                let s = expand_ball_indicator(&ball, 1, k + 1).map_err(|e| e.to_string())?;
                let energy = s.coefficient_energy();
                let expected = prime.powi(-r0) - 1.0;
                ensure((energy - expected).abs() <= 1e-12, || format!("p={p} r0={r0}: Σ|C|² = {energy}"))?;
                let n = k + 1;
                let total: f64 =
                    reconstruct_density(&s, prime, n).unwrap().iter().sum::<f64>() * prime.powi(-(n as i32));
                ensure((total - 1.0).abs() <= 1e-12, || format!("density integrates to {total}"))?;
                let s0 = ball_mass(&s, &ball);
                ensure((s0 - 1.0).abs() <= 1e-14, || format!("S(0) = {s0}"))?;
                worst = worst.max((energy - expected).abs()).max((total - 1.0).abs());
            }
        }
    }
    Ok(format!("p ∈ {{2, 3}}, r0 ∈ {{-1, -2}}, all centers, worst deviation {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 eigenvalue equivalence", ac1_eigenvalues),
        ("AC2 spectral vs dense RK4 (glass, G_3)", ac2_trajectory),
        ("AC3 Trotter first-order convergence", ac3_trotter),
        ("AC4 two-basin closed form", ac4_two_basin),
        ("AC5 protein anchors", ac5_protein),
        ("AC6 glass anchors", ac6_glass),
        ("AC7 Monte Carlo consistency", ac7_monte_carlo),
        ("AC8 Parseval and normalization", ac8_parseval),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
