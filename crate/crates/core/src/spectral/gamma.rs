use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{radial_tail_integral, Prime, RadialProfile};
use crate::quad::Simpson;
use crate::rates::{merged_breakpoints, RateFn};

/// Which `γ_r` a wavelet of support scale `s` decays with.
///
/// The dense-generator diagonalization shows that a wavelet supported on a
/// ball of volume `p^s` has eigenvalue `-γ_s` ([`SupportScale`]). The
/// published relaxation curves instead pair the wavelets supported on a whole
/// basin with `γ_{-1}`, i.e. one level deeper ([`Shifted`]).
///
/// [`SupportScale`]: EigenlevelConvention::SupportScale
/// [`Shifted`]: EigenlevelConvention::Shifted
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenlevelConvention {
    #[default]
    SupportScale,
    Shifted,
}

impl EigenlevelConvention {
    /// γ index used for a wavelet with support scale `support_scale`.
    pub fn gamma_index(self, support_scale: i32) -> i32 {
        match self {
            EigenlevelConvention::SupportScale => support_scale,
            EigenlevelConvention::Shifted => support_scale - 1,
        }
    }
}

/// Decay rate `γ_r(t) = (1 - 1/p) Σ_{j=0}^{-r} p^{-j} w(p^{-j}, t)
/// + p^{r-1} w(p^r, t) + outflow` of the wavelets attached to scale `r <= 0`.
pub fn gamma_eigenvalue(p: Prime, profile: &RadialProfile, outflow: f64, r: i32, t: f64) -> Result<f64> {
    if r > 0 {
        return Err(Error::usage(format!("wavelet scale r = {r} must be <= 0")));
    }
    let k = (-r) as usize;
    let shells = radial_tail_integral(profile, p, k, t)?;
    let innermost = p.powi(r - 1) * profile.rate(k, t)?;
    Ok(shells + innermost + outflow)
}

/// `γ_r` as a rate function of time for a basin with the given outflow.
pub fn gamma_fn(p: Prime, profile: &RadialProfile, outflow: &RateFn, r: i32) -> Result<RateFn> {
    if r > 0 {
        return Err(Error::usage(format!("wavelet scale r = {r} must be <= 0")));
    }
    let k = (-r) as usize;
    let levels = profile.level_fns(k + 1)?;
    let mut weights: Vec<f64> = (0..=k).map(|m| (1.0 - 1.0 / p.as_f64()) * p.powi(-(m as i32))).collect();
    weights[k] += p.powi(r - 1);
    let mut bp = merged_breakpoints(&levels);
    bp.extend_from_slice(outflow.breakpoints());
    let outflow = outflow.clone();
    Ok(RateFn::new(move |t| {
        let radial: f64 = levels.iter().zip(&weights).map(|(f, w)| w * f.eval(t)).sum();
        radial + outflow.eval(t)
    })
    .with_breakpoints(bp))
}

/// `∫_s^t γ_r(τ) dτ` by adaptive Simpson, split at rate breakpoints.
pub fn integrated_gamma(
    p: Prime,
    profile: &RadialProfile,
    outflow: &RateFn,
    r: i32,
    s: f64,
    t: f64,
    quad: &Simpson,
) -> Result<f64> {
    if t < s {
        return Err(Error::usage(format!("integration needs s <= t, got {s:e} > {t:e}")));
    }
    let gamma = gamma_fn(p, profile, outflow, r)?;
    quad.integrate_with_breaks(|x| gamma.eval(x), s, t, gamma.breakpoints())
}
