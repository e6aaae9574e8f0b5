//! Wavelet-sector analytics.
//!
//! A density on `K = ⊔ B(I)` splits into its per-basin means and a finite
//! Kozyrev-wavelet expansion. Inter-basin jumps only see the means; within a
//! basin every wavelet is an eigenfunction of the frozen operator, so the
//! wavelet coefficients evolve by scalar factors `exp(-∫ γ)`.

mod gamma;
mod state;

pub use gamma::{gamma_eigenvalue, gamma_fn, integrated_gamma, EigenlevelConvention};
pub use state::{
    ball_mass, evolve_spectral, expand_ball_indicator, reconstruct_density, survival_probability, SpectralOptions,
    SpectralState, WaveletTerm,
};
