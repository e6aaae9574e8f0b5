//! Physical rate laws: temperature schedules, Arrhenius transitions and the
//! temperature-dependent protein folding/unfolding rates.
//!
//! Temperatures are Kelvin everywhere; Celsius only appears inside the
//! solvent-viscosity law.

mod arrhenius;
mod protein;
mod rate_fn;
mod schedule;

pub use arrhenius::{arrhenius_rate, ArrheniusSpec, Energy, ThermalConstant, BOLTZMANN_EV, GAS_CONSTANT};
pub use protein::{protein_radial_profile, protein_rates, viscosity, viscosity_prefactor, ProteinThermo, ZERO_CELSIUS};
pub use rate_fn::{merged_breakpoints, RateFn};
pub use schedule::{temperature_at, Segment, SegmentShape, TemperatureSchedule};
