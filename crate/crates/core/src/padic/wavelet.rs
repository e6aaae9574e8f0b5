use std::f64::consts::TAU;

use nalgebra::Complex;

use super::address::{BallSpec, Prime, TreeAddress};
use crate::error::{Error, Result};

/// Index of a Kozyrev wavelet: its supporting ball (which fixes basin, scale
/// `r` and offset) and the rotation `j` in `1..p`.
///
/// The wavelet is `vol^{-1/2} * exp(2 pi i j c / p)` on the child with digit
/// `c` of its support and zero elsewhere, so it has unit L² norm and zero
/// mean.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveletIndex {
    support: BallSpec,
    j: u32,
}

impl WaveletIndex {
    pub fn new(support: BallSpec, j: u32) -> Result<Self> {
        let p = support.p().get();
        if j == 0 || j >= p {
            return Err(Error::usage(format!("rotation j = {j} outside 1..{p}")));
        }
        Ok(Self { support, j })
    }

    pub fn support(&self) -> &BallSpec {
        &self.support
    }

    pub fn basin(&self) -> usize {
        self.support.basin_index()
    }

    /// Support scale `r <= 0` (support volume `p^r`).
    pub fn scale(&self) -> i32 {
        self.support.scale()
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Value on the child of the support with digit `c`.
    pub fn value_on_child(&self, c: u32) -> Complex<f64> {
        let p = self.support.p();
        let amplitude = p.powi(-self.scale()).sqrt();
        // Angle reduced mod p before scaling keeps the roots of unity exact
        // to rounding of a single sin/cos.
        let k = (u64::from(self.j) * u64::from(c)) % u64::from(p.get());
        Complex::from_polar(amplitude, TAU * k as f64 / p.as_f64())
    }
}

/// Evaluates a wavelet at a tree point deep enough to resolve the children of
/// its support.
pub fn eval_wavelet(w: &WaveletIndex, x: &TreeAddress) -> Result<Complex<f64>> {
    let level = w.support.prefix().len();
    if x.depth() < level + 1 {
        return Err(Error::usage(format!(
            "point depth {} too shallow for wavelet of scale {} (need {})",
            x.depth(),
            w.scale(),
            level + 1
        )));
    }
    if !w.support.contains(x) {
        return Ok(Complex::new(0.0, 0.0));
    }
    Ok(w.value_on_child(x.digits()[level]))
}

/// All wavelets of one basin that are resolved on `G_n`, with support scales
/// down to `1-n`. Ordered by scale, then ball, then rotation.
pub fn wavelets_in_basin(p: Prime, basin: usize, n: usize) -> Vec<WaveletIndex> {
    let mut out = Vec::new();
    for level in 0..n {
        for ball_idx in 0..p.leaves(level) {
            let center = TreeAddress::from_leaf_index(p, basin, level, ball_idx);
            let support = BallSpec::new(p, basin, center.digits().to_vec()).expect("digits produced in range");
            for j in 1..p.get() {
                out.push(WaveletIndex { support: support.clone(), j });
            }
        }
    }
    out
}
