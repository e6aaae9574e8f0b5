use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};
use serde::Serialize;

use super::dense::build_dense_generator;
use crate::basin::{generator_matrix, stationary_vector, LandscapeModel};
use crate::error::{Error, Result};
use crate::padic::{wavelets_in_basin, BallSpec, TreeAddress, WaveletIndex};
use crate::spectral::{gamma_eigenvalue, EigenlevelConvention};

/// Mismatches are measured relative to `max(|λ|, RELATIVE_FLOOR · ρ)` with
/// `ρ` the spectral radius, so that the zero eigenvalue is comparable.
pub const RELATIVE_FLOOR: f64 = 1e-6;

/// Where a predicted eigenvalue comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenSource {
    Mean,
    Wavelet { basin: usize, support_scale: i32, gamma_index: i32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub predicted: f64,
    pub dense_re: f64,
    pub dense_im: f64,
    pub rel_error: f64,
    pub source: EigenSource,
}

/// Eigenvalue a wavelet of a given support scale actually has under the dense
/// generator, and which `γ` index reproduces it.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleMapping {
    pub basin: usize,
    pub support_scale: i32,
    pub eigenvalue: f64,
    pub residual: f64,
    pub gamma_index: Option<i32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralMatchReport {
    pub depth: usize,
    pub t0: f64,
    pub convention: EigenlevelConvention,
    pub pairs: Vec<EigenPair>,
    pub scale_mapping: Vec<ScaleMapping>,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl SpectralMatchReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }

    /// The convention implied by the measured scale mapping, if consistent.
    pub fn detected_convention(&self) -> Option<EigenlevelConvention> {
        [EigenlevelConvention::SupportScale, EigenlevelConvention::Shifted]
            .into_iter()
            .find(|c| self.scale_mapping.iter().all(|m| m.gamma_index == Some(c.gamma_index(m.support_scale))))
    }
}

/// Predicted spectrum of the generator on `G_n` frozen at `t0`: the mean
/// sector eigenvalues plus `-γ_{I,r}` with multiplicity `(p-1) p^{-r}` for
/// each basin and support scale `r = 0, -1, ..., 1-n`.
pub fn predicted_spectrum(
    model: &LandscapeModel,
    n: usize,
    t0: f64,
    convention: EigenlevelConvention,
) -> Result<Vec<(Complex<f64>, EigenSource)>> {
    let p = model.p();
    let mut out: Vec<(Complex<f64>, EigenSource)> =
        general_eigenvalues(generator_matrix(model, t0)?)?.into_iter().map(|z| (z, EigenSource::Mean)).collect();
    for basin in 0..model.basin_count() {
        let outflow = model.outflow(basin, t0);
        for level in 0..n {
            let support_scale = -(level as i32);
            let gamma_index = convention.gamma_index(support_scale);
            let g = gamma_eigenvalue(p, model.profile(basin), outflow, gamma_index, t0)?;
            let mult = (p.get() as usize - 1) * p.leaves(level);
            let source = EigenSource::Wavelet { basin, support_scale, gamma_index };
            out.extend(std::iter::repeat((Complex::new(-g, 0.0), source)).take(mult));
        }
    }
    Ok(out)
}

/// Diagonalizes the dense generator on `G_n` at `t0` and matches every
/// eigenvalue, with multiplicity, against [`predicted_spectrum`].
pub fn spectral_match(
    model: &LandscapeModel,
    n: usize,
    t0: f64,
    convention: EigenlevelConvention,
    tolerance: f64,
) -> Result<SpectralMatchReport> {
    let q = build_dense_generator(model, n, t0)?;
    let dense = dense_eigenvalues(model, n, t0, &q)?;
    let mut predicted = predicted_spectrum(model, n, t0, convention)?;
    predicted.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let radius = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = RELATIVE_FLOOR * radius.max(f64::MIN_POSITIVE);

    let mut used = vec![false; dense.len()];
    let mut pairs = Vec::with_capacity(predicted.len());
    let mut max_rel_error: f64 = 0.0;
    for (z, source) in predicted {
        let best = dense
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
            .map(|(i, _)| i);
        let Some(i) = best else { break };
        used[i] = true;
        let rel_error = (dense[i] - z).norm() / z.norm().max(floor);
        max_rel_error = max_rel_error.max(rel_error);
        pairs.push(EigenPair { predicted: z.re, dense_re: dense[i].re, dense_im: dense[i].im, rel_error, source });
    }
    if pairs.len() != dense.len() {
        max_rel_error = f64::INFINITY;
    }
    Ok(SpectralMatchReport {
        depth: n,
        t0,
        convention,
        pairs,
        scale_mapping: scale_mapping(model, n, t0, &q)?,
        max_rel_error,
        tolerance,
    })
}

const SCHUR_MAX_ITER: usize = 100_000;

fn general_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Tolerance("Schur decomposition did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of the dense generator. When the mean sector satisfies
/// detailed balance the generator is similar to a symmetric matrix through
/// `diag(sqrt(π))`, which keeps the highly degenerate wavelet levels accurate.
fn dense_eigenvalues(model: &LandscapeModel, n: usize, t0: f64, q: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let per = model.p().leaves(n);
    if let Ok(pi) = stationary_vector(model, t0) {
        if pi.iter().all(|&x| x > 0.0) {
            let d: Vec<f64> = (0..q.nrows()).map(|i| pi[i / per].sqrt()).collect();
            let s = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| q[(r, c)] * d[c] / d[r]);
            let asym = (&s - s.transpose()).amax();
            if asym <= 1e-12 * s.amax() {
                let sym = (&s + s.transpose()) * 0.5;
                let eig = SymmetricEigen::try_new(sym, f64::EPSILON, SCHUR_MAX_ITER)
                    .ok_or_else(|| Error::Tolerance("symmetric eigensolver did not converge".into()))?;
                return Ok(eig.eigenvalues.iter().map(|&x| Complex::new(x, 0.0)).collect());
            }
        }
    }
    general_eigenvalues(q.clone())
}

/// Applies the dense generator to one wavelet per basin and support scale and
/// identifies the `γ` index that reproduces its eigenvalue.
fn scale_mapping(model: &LandscapeModel, n: usize, t0: f64, q: &DMatrix<f64>) -> Result<Vec<ScaleMapping>> {
    let p = model.p();
    let per = p.leaves(n);
    let mut out = Vec::new();
    for basin in 0..model.basin_count() {
        let outflow = model.outflow(basin, t0);
        let candidates: Vec<(i32, f64)> = (0..=n as i32)
            .map(|k| gamma_eigenvalue(p, model.profile(basin), outflow, -k, t0).map(|g| (-k, -g)))
            .collect::<Result<_>>()?;
        for level in 0..n {
            let support = BallSpec::new(p, basin, vec![0; level])?;
            let w = WaveletIndex::new(support, 1)?;
            let psi = wavelet_vector(&w, model.basin_count(), n, per);
            let qpsi = q.map(|x| Complex::new(x, 0.0)) * &psi;
            let lambda = psi.dotc(&qpsi) / psi.dotc(&psi);
            let residual = (&qpsi - &psi * lambda).norm() / psi.norm();
            let support_scale = -(level as i32);
            let scale = lambda.norm().max(1.0);
            // Prefer the support-scale match when profiles make several γ coincide.
            let gamma_index = candidates
                .iter()
                .filter(|(_, g)| (g - lambda.re).abs() <= 1e-8 * scale)
                .min_by_key(|(k, _)| (k - support_scale).abs())
                .map(|(k, _)| *k);
            out.push(ScaleMapping { basin, support_scale, eigenvalue: lambda.re, residual, gamma_index });
        }
    }
    Ok(out)
}

fn wavelet_vector(w: &WaveletIndex, basins: usize, n: usize, per: usize) -> DVector<Complex<f64>> {
    let p = w.support().p();
    let mut v = DVector::zeros(basins * per);
    for i in 0..per {
        let x = TreeAddress::from_leaf_index(p, w.basin(), n, i);
        if w.support().contains(&x) {
            v[w.basin() * per + i] = w.value_on_child(x.digits()[w.support().prefix().len()]);
        }
    }
    v
}

/// All wavelets resolved on `G_n` across every basin, in basis order.
pub fn grid_wavelets(model: &LandscapeModel, n: usize) -> Vec<WaveletIndex> {
    (0..model.basin_count()).flat_map(|b| wavelets_in_basin(model.p(), b, n)).collect()
}
