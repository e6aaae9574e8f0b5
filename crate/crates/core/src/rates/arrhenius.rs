use serde::{Deserialize, Serialize};

use super::rate_fn::RateFn;
use super::schedule::TemperatureSchedule;
use crate::error::{Error, Result};

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617_333_262e-5;
/// Molar gas constant in J/(mol K).
pub const GAS_CONSTANT: f64 = 8.314;

/// Activation barrier with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Energy {
    ElectronVolt(f64),
    JoulePerMole(f64),
}

/// Constant converting temperature to the barrier's energy unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalConstant {
    /// `k_B` in eV/K; pairs with [`Energy::ElectronVolt`].
    Boltzmann,
    /// `R` in J/(mol K); pairs with [`Energy::JoulePerMole`].
    GasConstant,
}

impl ThermalConstant {
    pub fn value(self) -> f64 {
        match self {
            ThermalConstant::Boltzmann => BOLTZMANN_EV,
            ThermalConstant::GasConstant => GAS_CONSTANT,
        }
    }
}

/// `prefactor * exp(-barrier / (k T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrheniusSpec {
    prefactor_hz: f64,
    barrier: f64,
    constant: ThermalConstant,
}

impl ArrheniusSpec {
    /// Rejects negative barriers, non-positive prefactors and mixed unit
    /// systems (eV with R, J/mol with k_B).
    pub fn new(prefactor_hz: f64, barrier: Energy, constant: ThermalConstant) -> Result<Self> {
        if !(prefactor_hz > 0.0) || !prefactor_hz.is_finite() {
            return Err(Error::config("prefactor_hz", "must be positive and finite"));
        }
        let value = match (barrier, constant) {
            (Energy::ElectronVolt(v), ThermalConstant::Boltzmann) => v,
            (Energy::JoulePerMole(v), ThermalConstant::GasConstant) => v,
            (Energy::ElectronVolt(_), ThermalConstant::GasConstant) => {
                return Err(Error::config("barrier", "eV barrier cannot be combined with the molar gas constant"))
            }
            (Energy::JoulePerMole(_), ThermalConstant::Boltzmann) => {
                return Err(Error::config(
                    "barrier",
                    "J/mol barrier cannot be combined with the Boltzmann constant in eV/K",
                ))
            }
        };
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::config("barrier", "must be non-negative and finite"));
        }
        Ok(Self { prefactor_hz, barrier: value, constant })
    }

    /// Shorthand for an eV barrier with `k_B`.
    pub fn ev(prefactor_hz: f64, barrier_ev: f64) -> Result<Self> {
        Self::new(prefactor_hz, Energy::ElectronVolt(barrier_ev), ThermalConstant::Boltzmann)
    }

    pub fn rate(&self, kelvin: f64) -> f64 {
        arrhenius_rate(self, kelvin)
    }

    /// Rate as a function of time along a temperature schedule.
    pub fn rate_fn(&self, schedule: &TemperatureSchedule) -> RateFn {
        let spec = *self;
        let sched = schedule.clone();
        RateFn::new(move |t| spec.rate(sched.at(t))).with_breakpoints(schedule.breakpoints())
    }
}

pub fn arrhenius_rate(spec: &ArrheniusSpec, kelvin: f64) -> f64 {
    spec.prefactor_hz * (-spec.barrier / (spec.constant.value() * kelvin)).exp()
}
