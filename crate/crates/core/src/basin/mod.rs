//! Inter-metabasin (mean-sector) dynamics: the `N x N` time-dependent rate
//! matrix and its evolution family.
//!
//! The intra-basin radial kernel does not act on functions that are constant
//! on each basin, so the mean sector only sees inter-basin rates. The wavelet
//! sector carries the radial part (see [`crate::spectral`]).

mod expm;
mod mean;
mod model;
mod two_state;

pub use expm::expm;
pub use mean::{
    basin_pair_rates, evolve_mean_rk4, evolve_mean_trotter, MeanEvolution, MeanMethod, MeanSolver, DRIFT_LIMIT,
    NEGATIVE_ENTRY_LIMIT,
};
pub use model::{generator_matrix, stationary_vector, Basin, LandscapeModel};
pub use two_state::{p1_closed_form, p1_taylor_piecewise, TwoStateRates};
