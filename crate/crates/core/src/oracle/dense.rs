use nalgebra::{DMatrix, DVector};

use crate::basin::{LandscapeModel, DRIFT_LIMIT, NEGATIVE_ENTRY_LIMIT};
use crate::error::{Error, Result};
use crate::padic::{BallSpec, Prime, TreeAddress};
use crate::spectral::{reconstruct_density, SpectralState};

/// Largest dense state space the oracle will build.
pub const DENSE_STATE_CAP: usize = 2000;

/// RK4 is stable on the negative real axis up to `h |λ| ≈ 2.78`.
const RK4_STABILITY: f64 = 2.5;

/// Probability mass on each leaf of `G_n`, basin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeState {
    p: Prime,
    depth: usize,
    basins: usize,
    mass: DVector<f64>,
}

impl TreeState {
    pub fn new(p: Prime, depth: usize, basins: usize, mass: DVector<f64>) -> Result<Self> {
        let len = basins * p.leaves(depth);
        if mass.len() != len {
            return Err(Error::usage(format!("tree state needs {len} entries, got {}", mass.len())));
        }
        let s = Self { p, depth, basins, mass };
        s.validate()?;
        Ok(s)
    }

    /// Normalized indicator of `ball` resolved on `G_depth`.
    pub fn from_ball(ball: &BallSpec, basins: usize, depth: usize) -> Result<Self> {
        let p = ball.p();
        if ball.basin_index() >= basins {
            return Err(Error::usage(format!("ball lies in basin {} of {basins}", ball.basin_index())));
        }
        if ball.prefix().len() > depth {
            return Err(Error::usage(format!("ball of scale {} is finer than depth {depth}", ball.scale())));
        }
        let per = p.leaves(depth);
        let mut mass = DVector::zeros(basins * per);
        let inside = p.leaves(depth - ball.prefix().len());
        let first = first_leaf(ball, depth);
        for i in 0..inside {
            mass[ball.basin_index() * per + first + i] = 1.0 / inside as f64;
        }
        Ok(Self { p, depth, basins, mass })
    }

    /// Leaf masses of a spectral state.
    pub fn from_spectral(state: &SpectralState, p: Prime, depth: usize) -> Result<Self> {
        let cell = p.powi(-(depth as i32));
        let density = reconstruct_density(state, p, depth)?;
        Ok(Self {
            p,
            depth,
            basins: state.mean.len(),
            mass: DVector::from_iterator(density.len(), density.into_iter().map(|d| d * cell)),
        })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn basins(&self) -> usize {
        self.basins
    }

    pub fn mass(&self) -> &DVector<f64> {
        &self.mass
    }

    /// Mass divided by the Haar weight `p^-n` of a leaf.
    pub fn density(&self) -> Vec<f64> {
        let inv = self.p.powi(self.depth as i32);
        self.mass.iter().map(|m| m * inv).collect()
    }

    pub fn basin_mass(&self, basin: usize) -> f64 {
        let per = self.p.leaves(self.depth);
        self.mass.rows(basin * per, per).sum()
    }

    pub fn ball_mass(&self, ball: &BallSpec) -> f64 {
        let per = self.p.leaves(self.depth);
        let k = ball.prefix().len().min(self.depth);
        let first = first_leaf(ball, self.depth);
        self.mass.rows(ball.basin_index() * per + first, self.p.leaves(self.depth - k)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.mass.iter().find(|&&x| !(x >= NEGATIVE_ENTRY_LIMIT)) {
            return Err(Error::Tolerance(format!("tree state has entry {bad:e}")));
        }
        let total = self.mass.sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Tolerance(format!("tree state has total mass {total}")));
        }
        Ok(())
    }
}

fn first_leaf(ball: &BallSpec, depth: usize) -> usize {
    let base = ball.p().get() as usize;
    let k = ball.prefix().len().min(depth);
    let head = ball.prefix()[..k].iter().fold(0usize, |acc, &d| acc * base + d as usize);
    head * base.pow((depth - k) as u32)
}

fn check_cap(p: Prime, basins: usize, n: usize) -> Result<usize> {
    let per = (p.get() as usize).checked_pow(n as u32).ok_or_else(|| Error::usage("dense state space overflows"))?;
    let states = per * basins;
    if states > DENSE_STATE_CAP {
        return Err(Error::usage(format!(
            "dense oracle limited to {DENSE_STATE_CAP} states, requested {states} (N = {basins}, p^n = {per}); \
             use the spectral solver for deeper trees"
        )));
    }
    Ok(states)
}

/// Precomputed pair structure of `G_n` so that the generator can be refilled
/// for each `t` without recomputing distances.
#[derive(Debug, Clone)]
pub struct DenseLayout {
    p: Prime,
    depth: usize,
    basins: usize,
    /// Common-prefix length of every same-basin leaf pair, row-major.
    level: Vec<u8>,
}

impl DenseLayout {
    pub fn new(p: Prime, basins: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::usage("dense oracle needs depth n >= 1"));
        }
        check_cap(p, basins, depth)?;
        let per = p.leaves(depth);
        let leaves: Vec<TreeAddress> = (0..per).map(|i| TreeAddress::from_leaf_index(p, 0, depth, i)).collect();
        let mut level = vec![0u8; per * per];
        for (a, la) in leaves.iter().enumerate() {
            for (b, lb) in leaves.iter().enumerate() {
                level[a * per + b] = la.common_prefix(lb) as u8;
            }
        }
        Ok(Self { p, depth, basins, level })
    }

    pub fn states(&self) -> usize {
        self.basins * self.p.leaves(self.depth)
    }

    /// Fills `q` with the generator at time `t`.
    pub fn fill(&self, model: &LandscapeModel, t: f64, q: &mut DMatrix<f64>) -> Result<()> {
        let per = self.p.leaves(self.depth);
        let cell = self.p.powi(-(self.depth as i32));
        let nb = self.basins;
        q.fill(0.0);
        for i in 0..nb {
            let w: Vec<f64> =
                (0..self.depth).map(|k| model.profile(i).rate(k, t).map(|v| v * cell)).collect::<Result<_>>()?;
            let off = i * per;
            for a in 0..per {
                for b in 0..per {
                    if a != b {
                        q[(off + a, off + b)] = w[self.level[a * per + b] as usize];
                    }
                }
            }
            for j in 0..nb {
                if j == i {
                    continue;
                }
                let r = model.rate(i, j, t) * cell;
                let to = j * per;
                for a in 0..per {
                    for b in 0..per {
                        q[(to + a, off + b)] = r;
                    }
                }
            }
        }
        for c in 0..q.ncols() {
            let out: f64 = q.column(c).iter().sum();
            q[(c, c)] = -out;
        }
        Ok(())
    }
}

/// Master-equation generator on the leaves of `G_n` at time `t`: entry
/// `(a, b)` is the rate `b -> a`, `w(|a - b|_p, t) p^-n` within a basin and
/// `w_{IJ}(t) p^-n` across basins. Columns sum to zero.
pub fn build_dense_generator(model: &LandscapeModel, n: usize, t: f64) -> Result<DMatrix<f64>> {
    model.check_time(t)?;
    let layout = DenseLayout::new(model.p(), model.basin_count(), n)?;
    let mut q = DMatrix::zeros(layout.states(), layout.states());
    layout.fill(model, t, &mut q)?;
    Ok(q)
}

/// RK4 solution of `df/dt = Q(t) f` reported at every `grid` time, with
/// internal steps no larger than `dt`. `grid[0]` is the start time.
pub fn solve_dense_ode(u0: &TreeState, model: &LandscapeModel, grid: &[f64], dt: f64) -> Result<Vec<TreeState>> {
    if u0.basins != model.basin_count() || u0.p != model.p() {
        return Err(Error::usage("tree state does not match the model"));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::usage("time grid must be non-empty and strictly increasing"));
    }
    if !(dt > 0.0) {
        return Err(Error::usage("rk4 dt must be positive"));
    }
    model.check_time(grid[0])?;
    model.check_time(grid[grid.len() - 1])?;
    u0.validate()?;
    let layout = DenseLayout::new(u0.p, u0.basins, u0.depth)?;
    let n = layout.states();
    let (mut q0, mut qm, mut q1) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n));
    let mut u = u0.mass.clone();
    let mut out = Vec::with_capacity(grid.len());
    out.push(u0.clone());
    for w in grid.windows(2) {
        let (s, t) = (w[0], w[1]);
        let steps = (((t - s) / dt).ceil() as usize).max(1);
        let h = (t - s) / steps as f64;
        for k in 0..steps {
            let tk = s + k as f64 * h;
            layout.fill(model, tk, &mut q0)?;
            layout.fill(model, tk + 0.5 * h, &mut qm)?;
            layout.fill(model, tk + h, &mut q1)?;
            let stiff = q0.diagonal().amax().max(q1.diagonal().amax()).max(qm.diagonal().amax());
            if h * stiff > RK4_STABILITY {
                return Err(Error::StepRejected { t: tk, dt: h, value: -h * stiff });
            }
            let k1 = &q0 * &u;
            let k2 = &qm * (&u + &k1 * (0.5 * h));
            let k3 = &qm * (&u + &k2 * (0.5 * h));
            let k4 = &q1 * (&u + &k3 * h);
            u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            if let Some(&bad) = u.iter().find(|&&x| x < NEGATIVE_ENTRY_LIMIT) {
                return Err(Error::StepRejected { t: tk, dt: h, value: bad });
            }
            let total = u.sum();
            if (total - 1.0).abs() > DRIFT_LIMIT {
                u /= total;
            }
        }
        out.push(TreeState { p: u0.p, depth: u0.depth, basins: u0.basins, mass: u.clone() });
    }
    Ok(out)
}
