//! Reference engines: the dense master equation on the finite tree `G_n`, an
//! eigenvalue matcher for the wavelet spectrum, and a thinning-based sampler
//! of the jump process.

mod dense;
mod eigen;
mod monte_carlo;

pub use dense::{build_dense_generator, solve_dense_ode, DenseLayout, TreeState, DENSE_STATE_CAP};
pub use eigen::{
    grid_wavelets, predicted_spectrum, spectral_match, EigenPair, EigenSource, ScaleMapping, SpectralMatchReport,
    RELATIVE_FLOOR,
};
pub use monte_carlo::{
    chi_square, mc_simulate, sample_path, thinning_bound, ChiSquareTest, McOccupation, SamplePath, THINNING_SAFETY,
};
