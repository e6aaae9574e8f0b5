use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::basin::LandscapeModel;
use crate::error::{Error, Result};
use crate::padic::{BallSpec, Prime, TreeAddress};

/// Safety factor on the sampled maximum exit rate.
pub const THINNING_SAFETY: f64 = 1.05;
const BOUND_SAMPLES: usize = 1025;
const CHUNK: usize = 256;

/// One trajectory of the jump process on `G_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub seed: u64,
    pub stream: u64,
    /// State at the start followed by the state after each jump.
    pub states: Vec<TreeAddress>,
    pub jump_times: Vec<f64>,
}

/// Leaf occupation counts at each checkpoint, basin-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McOccupation {
    pub p: u32,
    pub depth: usize,
    pub basins: usize,
    pub paths: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub thinning_bound: f64,
    pub checkpoints: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
}

impl McOccupation {
    fn per_basin(&self) -> usize {
        (self.p as usize).pow(self.depth as u32)
    }

    /// Fraction of paths in `ball` at each checkpoint.
    pub fn ball_fraction(&self, ball: &BallSpec) -> Vec<f64> {
        let per = self.per_basin();
        let k = ball.prefix().len().min(self.depth);
        let width = (self.p as usize).pow((self.depth - k) as u32);
        let base = self.p as usize;
        let head = ball.prefix()[..k].iter().fold(0usize, |a, &d| a * base + d as usize);
        let start = ball.basin_index() * per + head * width;
        self.counts.iter().map(|c| c[start..start + width].iter().sum::<u64>() as f64 / self.paths as f64).collect()
    }

    pub fn basin_fraction(&self, basin: usize) -> Vec<f64> {
        self.ball_fraction(&BallSpec::basin(Prime::new(self.p).expect("prime"), basin))
    }
}

/// Exit rate of any leaf of `basin` on `G_n`:
/// `Σ_k (1 - 1/p) p^-k w_k(t) + outflow(t)`.
fn exit_rate(model: &LandscapeModel, basin: usize, n: usize, t: f64, level_rates: &mut [f64]) -> Result<f64> {
    let p = model.p().as_f64();
    let mut total = 0.0;
    let mut shell = 1.0 - 1.0 / p;
    for (k, slot) in level_rates.iter_mut().enumerate().take(n) {
        *slot = shell * model.profile(basin).rate(k, t)?;
        total += *slot;
        shell /= p;
    }
    Ok(total + model.outflow(basin, t))
}

/// `THINNING_SAFETY` times the largest exit rate on a uniform sample of the
/// horizon together with all rate breakpoints.
pub fn thinning_bound(model: &LandscapeModel, n: usize) -> Result<f64> {
    let (a, b) = model.horizon();
    let mut times: Vec<f64> = (0..BOUND_SAMPLES).map(|k| a + (b - a) * k as f64 / (BOUND_SAMPLES - 1) as f64).collect();
    times.extend(model.breakpoints().into_iter().filter(|&x| x >= a && x <= b));
    let mut scratch = vec![0.0; n];
    let mut max: f64 = 0.0;
    for &t in &times {
        for basin in 0..model.basin_count() {
            max = max.max(exit_rate(model, basin, n, t, &mut scratch)?);
        }
    }
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::usage("model has no positive exit rate on its horizon"));
    }
    Ok(THINNING_SAFETY * max)
}

struct Sampler<'a> {
    model: &'a LandscapeModel,
    n: usize,
    p: u32,
    bound: f64,
    end: f64,
}

impl Sampler<'_> {
    fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }

    fn initial(&self, ball: &BallSpec, rng: &mut ChaCha8Rng) -> (usize, Vec<u32>) {
        let mut digits = ball.prefix().to_vec();
        while digits.len() < self.n {
            digits.push(rng.random_range(0..self.p));
        }
        (ball.basin_index(), digits)
    }

    /// Advances to the next accepted jump after `t`, or `None` past the end.
    fn next_jump(
        &self,
        t: &mut f64,
        basin: &mut usize,
        digits: &mut [u32],
        rng: &mut ChaCha8Rng,
        scratch: &mut [f64],
    ) -> Result<bool> {
        loop {
            let u: f64 = rng.random();
            *t += -(1.0 - u).ln() / self.bound;
            if *t > self.end {
                return Ok(false);
            }
            let exit = exit_rate(self.model, *basin, self.n, *t, scratch)?;
            if exit > self.bound {
                return Err(Error::ThinningBound { t: *t, rate: exit, bound: self.bound });
            }
            let v: f64 = rng.random::<f64>() * self.bound;
            if v >= exit {
                continue;
            }
            // `v` is uniform on [0, exit): reuse it to pick the move.
            let mut acc = 0.0;
            for (k, &rate) in scratch.iter().enumerate().take(self.n) {
                acc += rate;
                if v < acc {
                    let shift = rng.random_range(1..self.p);
                    digits[k] = (digits[k] + shift) % self.p;
                    for d in digits.iter_mut().skip(k + 1) {
                        *d = rng.random_range(0..self.p);
                    }
                    return Ok(true);
                }
            }
            let mut target = *basin;
            for j in (0..self.model.basin_count()).filter(|&j| j != *basin) {
                target = j;
                acc += self.model.rate(*basin, j, *t);
                if v < acc {
                    break;
                }
            }
            // Rounding can leave `v` just past the last partial sum.
            if target != *basin {
                *basin = target;
                for d in digits.iter_mut() {
                    *d = rng.random_range(0..self.p);
                }
                return Ok(true);
            }
        }
    }
}

fn check_inputs(model: &LandscapeModel, ball: &BallSpec, n: usize) -> Result<()> {
    if ball.p() != model.p() || ball.basin_index() >= model.basin_count() {
        return Err(Error::usage("initial ball does not belong to the model"));
    }
    if n == 0 || ball.prefix().len() > n {
        return Err(Error::usage(format!("depth {n} cannot resolve the initial ball")));
    }
    Ok(())
}

/// One trajectory started uniformly inside `ball` at the horizon start,
/// driven by stream `stream` of `seed`.
pub fn sample_path(model: &LandscapeModel, ball: &BallSpec, n: usize, seed: u64, stream: u64) -> Result<SamplePath> {
    check_inputs(model, ball, n)?;
    let sampler = Sampler { model, n, p: model.p().get(), bound: thinning_bound(model, n)?, end: model.horizon().1 };
    let mut rng = Sampler::rng(seed, stream);
    let (mut basin, mut digits) = sampler.initial(ball, &mut rng);
    let mut t = model.horizon().0;
    let mut scratch = vec![0.0; n];
    let mut path = SamplePath {
        seed,
        stream,
        states: vec![TreeAddress::new(model.p(), basin, digits.clone())?],
        jump_times: Vec::new(),
    };
    while sampler.next_jump(&mut t, &mut basin, &mut digits, &mut rng, &mut scratch)? {
        path.jump_times.push(t);
        path.states.push(TreeAddress::new(model.p(), basin, digits.clone())?);
    }
    Ok(path)
}

/// Simulates `paths` independent trajectories by Lewis–Shedler thinning and
/// counts leaf occupation at each checkpoint. Path `i` uses stream `i` of a
/// ChaCha8 generator seeded with `seed`, so results do not depend on the
/// thread count.
pub fn mc_simulate(
    model: &LandscapeModel,
    ball: &BallSpec,
    n: usize,
    checkpoints: &[f64],
    paths: usize,
    seed: u64,
) -> Result<McOccupation> {
    check_inputs(model, ball, n)?;
    let (a, b) = model.horizon();
    if checkpoints.windows(2).any(|w| !(w[1] > w[0])) || checkpoints.iter().any(|&c| c < a || c > b) {
        return Err(Error::usage("checkpoints must be increasing and inside the horizon"));
    }
    if paths == 0 {
        return Err(Error::usage("at least one path is required"));
    }
    let p = model.p().get();
    let per = (p as usize).pow(n as u32);
    let states = per * model.basin_count();
    let bound = thinning_bound(model, n)?;
    let sampler = Sampler { model, n, p, bound, end: checkpoints.last().copied().unwrap_or(a) };
    let base = p as usize;
    let leaf =
        |basin: usize, digits: &[u32]| basin * per + digits.iter().fold(0usize, |acc, &d| acc * base + d as usize);

    let chunks: Vec<(usize, usize)> = (0..paths).step_by(CHUNK).map(|s| (s, (s + CHUNK).min(paths))).collect();
    let partial: Vec<Vec<Vec<u64>>> = chunks
        .par_iter()
        .map(|&(lo, hi)| -> Result<Vec<Vec<u64>>> {
            let mut counts = vec![vec![0u64; states]; checkpoints.len()];
            let mut scratch = vec![0.0; n];
            for i in lo..hi {
                let mut rng = Sampler::rng(seed, i as u64);
                let (mut basin, mut digits) = sampler.initial(ball, &mut rng);
                let mut t = a;
                let mut next = 0;
                loop {
                    let before = (basin, leaf(basin, &digits));
                    let jumped = sampler.next_jump(&mut t, &mut basin, &mut digits, &mut rng, &mut scratch)?;
                    while next < checkpoints.len() && (!jumped || checkpoints[next] < t) {
                        counts[next][before.1] += 1;
                        next += 1;
                    }
                    if !jumped || next == checkpoints.len() {
                        break;
                    }
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![vec![0u64; states]; checkpoints.len()];
    for part in partial {
        for (acc, c) in counts.iter_mut().zip(part) {
            for (x, y) in acc.iter_mut().zip(c) {
                *x += y;
            }
        }
    }
    Ok(McOccupation {
        p,
        depth: n,
        basins: model.basin_count(),
        paths,
        seed,
        rng: "ChaCha8",
        thinning_bound: bound,
        checkpoints: checkpoints.to_vec(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson goodness-of-fit of `counts` against `probabilities`. Cells with an
/// expected count below 5 are pooled into one cell.
pub fn chi_square(counts: &[u64], probabilities: &[f64]) -> Result<ChiSquareTest> {
    if counts.len() != probabilities.len() || counts.is_empty() {
        return Err(Error::usage("counts and probabilities must have the same non-zero length"));
    }
    let total: u64 = counts.iter().sum();
    let norm: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probabilities) {
        let e = total as f64 * p.max(0.0) / norm;
        if e < 5.0 {
            pooled_obs += c as f64;
            pooled_exp += e;
        } else {
            cells.push((c as f64, e));
        }
    }
    if pooled_exp > 0.0 || pooled_obs > 0.0 {
        cells.push((pooled_obs, pooled_exp.max(f64::MIN_POSITIVE)));
    }
    if cells.len() < 2 {
        return Err(Error::usage("chi-square test needs at least two cells"));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::usage(e.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}
