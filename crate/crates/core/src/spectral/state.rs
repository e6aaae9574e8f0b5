use std::collections::BTreeMap;

use nalgebra::{Complex, DVector};
use rayon::prelude::*;

use super::gamma::{integrated_gamma, EigenlevelConvention};
use crate::basin::{LandscapeModel, MeanSolver};
use crate::error::{Error, Result};
use crate::padic::{BallSpec, Prime, TreeAddress, WaveletIndex};
use crate::quad::Simpson;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletTerm {
    pub index: WaveletIndex,
    pub coefficient: Complex<f64>,
}

/// Solution in the basin-mean ⊕ wavelet decomposition.
///
/// `mean[I]` is the probability of basin `I` (its unit ball has volume 1, so
/// it is also the mean density there).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub mean: DVector<f64>,
    pub wavelets: Vec<WaveletTerm>,
    pub time: f64,
}

impl SpectralState {
    pub fn coefficient_energy(&self) -> f64 {
        self.wavelets.iter().map(|w| w.coefficient.norm_sqr()).sum()
    }

    /// Deepest support level among the terms, plus one: the minimum tree
    /// depth on which the state is resolved.
    pub fn min_depth(&self) -> usize {
        self.wavelets.iter().map(|w| w.index.support().prefix().len() + 1).max().unwrap_or(0)
    }
}

/// Solver settings for the spectral evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub convention: EigenlevelConvention,
    pub quad: Simpson,
    pub mean_solver: MeanSolver,
}

impl SpectralOptions {
    pub fn new(mean_solver: MeanSolver) -> Self {
        Self { convention: EigenlevelConvention::default(), quad: Simpson::default(), mean_solver }
    }

    pub fn with_convention(mut self, convention: EigenlevelConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.quad = Simpson::new(tol);
        self
    }
}

/// Expansion of the normalized indicator `p^{-r0} 1_B` of `target`.
///
/// Only wavelets whose support strictly contains `target` overlap it: for a
/// ball at depth `k` these are the `(p-1) k` wavelets on its ancestors, with
/// `C = conj(ψ(B))`. The mean part is 1 on the target's basin.
pub fn expand_ball_indicator(target: &BallSpec, basin_count: usize, depth: usize) -> Result<SpectralState> {
    if target.basin_index() >= basin_count {
        return Err(Error::usage(format!(
            "ball lies in basin {} but the model has {basin_count} basins",
            target.basin_index()
        )));
    }
    let k = target.prefix().len();
    if depth < k + 1 {
        return Err(Error::usage(format!(
            "depth {depth} cannot resolve a ball of scale {} (need {})",
            target.scale(),
            k + 1
        )));
    }
    let p = target.p();
    let mut mean = DVector::zeros(basin_count);
    mean[target.basin_index()] = 1.0;
    let mut wavelets = Vec::with_capacity((p.get() as usize - 1) * k);
    for level in 0..k {
        let support = BallSpec::new(p, target.basin_index(), target.prefix()[..level].to_vec())?;
        let child = target.prefix()[level];
        for j in 1..p.get() {
            let index = WaveletIndex::new(support.clone(), j)?;
            let coefficient = index.value_on_child(child).conj();
            wavelets.push(WaveletTerm { index, coefficient });
        }
    }
    Ok(SpectralState { mean, wavelets, time: 0.0 })
}

/// Advances `state` from `state.time` to `t`: the mean sector by the
/// configured solver, every wavelet coefficient by `exp(-∫ γ_{I,r})` with
/// `r` chosen by the eigenlevel convention. Wavelet indices are unchanged.
pub fn evolve_spectral(
    state: &SpectralState,
    model: &LandscapeModel,
    t: f64,
    opts: &SpectralOptions,
) -> Result<SpectralState> {
    let s = state.time;
    if t < s {
        return Err(Error::usage(format!("cannot evolve backwards from {s:e} to {t:e}")));
    }
    if t == s {
        return Ok(state.clone());
    }
    let mean = opts.mean_solver.propagate(model, &state.mean, s, t)?;

    let mut groups: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    for (i, w) in state.wavelets.iter().enumerate() {
        groups.entry((w.index.basin(), w.index.scale())).or_default().push(i);
    }
    let keys: Vec<(usize, i32)> = groups.keys().copied().collect();
    let factors: Vec<f64> = keys
        .par_iter()
        .map(|&(basin, scale)| {
            let r = opts.convention.gamma_index(scale);
            let outflow = model.outflow_fn(basin);
            integrated_gamma(model.p(), model.profile(basin), &outflow, r, s, t, &opts.quad).map(|g| (-g).exp())
        })
        .collect::<Result<_>>()?;

    let mut wavelets = state.wavelets.clone();
    for (key, factor) in keys.iter().zip(factors) {
        for &i in &groups[key] {
            wavelets[i].coefficient *= factor;
        }
    }
    Ok(SpectralState { mean, wavelets, time: t })
}

/// Density on every leaf of `G_n` (basin-major, leaves in index order).
pub fn reconstruct_density(state: &SpectralState, p: Prime, n: usize) -> Result<Vec<f64>> {
    if n < state.min_depth() {
        return Err(Error::usage(format!("depth {n} cannot resolve the state (need {})", state.min_depth())));
    }
    let per_basin = p.leaves(n);
    let mut density: Vec<Complex<f64>> =
        state.mean.iter().flat_map(|&m| std::iter::repeat(Complex::new(m, 0.0)).take(per_basin)).collect();
    for term in &state.wavelets {
        let support = term.index.support();
        let level = support.prefix().len();
        let first = TreeAddress::new(p, support.basin_index(), {
            let mut d = support.prefix().to_vec();
            d.resize(n, 0);
            d
        })?
        .leaf_index();
        let span = p.leaves(n - level);
        let child_span = span / p.get() as usize;
        let offset = support.basin_index() * per_basin + first;
        for c in 0..p.get() {
            let v = term.coefficient * term.index.value_on_child(c);
            let start = offset + c as usize * child_span;
            for slot in &mut density[start..start + child_span] {
                *slot += v;
            }
        }
    }
    Ok(density.into_iter().map(|z| z.re).collect())
}

/// Probability mass of `ball` under the state.
pub fn ball_mass(state: &SpectralState, ball: &BallSpec) -> f64 {
    let vol = ball.volume();
    let mut mass = vol * state.mean[ball.basin_index()];
    for term in &state.wavelets {
        let support = term.index.support();
        let level = support.prefix().len();
        if ball.prefix().len() > level && support.contains_ball(ball) {
            let v = term.coefficient * term.index.value_on_child(ball.prefix()[level]);
            mass += vol * v.re;
        }
    }
    mass
}

/// Occupation probability `S(t)` of `initial` starting from its normalized
/// indicator at `grid[0]`.
pub fn survival_probability(
    initial: &BallSpec,
    model: &LandscapeModel,
    grid: &[f64],
    opts: &SpectralOptions,
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::usage("time grid must be non-empty and strictly increasing"));
    }
    let mut state = expand_ball_indicator(initial, model.basin_count(), initial.prefix().len() + 1)?;
    state.time = grid[0];
    let mut out = Vec::with_capacity(grid.len());
    out.push((grid[0], ball_mass(&state, initial)));
    for &t in &grid[1..] {
        state = evolve_spectral(&state, model, t, opts)?;
        out.push((t, ball_mass(&state, initial)));
    }
    Ok(out)
}
