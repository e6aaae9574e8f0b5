//! Kinetics on p-adic energy landscapes. The wavelet/mean-sector spectral
//! solver is checked against dense and Monte Carlo oracles; the glass and
//! protein scenarios sit on top of it.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basin;
pub mod error;
pub mod oracle;
pub mod padic;
pub mod quad;
pub mod rates;
pub mod scenario;
pub mod spectral;

pub use basin::{
    generator_matrix, stationary_vector, Basin, LandscapeModel, MeanEvolution, MeanMethod, MeanSolver, TwoStateRates,
};
pub use error::{Error, Result};
pub use padic::{BallSpec, Prime, RadialProfile, TailRule, TreeAddress, WaveletIndex};
pub use quad::Simpson;
pub use rates::{RateFn, TemperatureSchedule};
pub use scenario::{OutputBundle, RunReport, ScenarioConfig};
pub use spectral::{EigenlevelConvention, SpectralOptions, SpectralState};
