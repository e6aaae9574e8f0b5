use serde::{Deserialize, Serialize};

use super::rate_fn::RateFn;
use super::schedule::TemperatureSchedule;
use crate::padic::{RadialProfile, TailRule};

/// 0 °C in Kelvin.
pub const ZERO_CELSIUS: f64 = 273.15;

/// Thermodynamic parameters of the two-state folding model.
///
/// Defaults are the in-vitro parameter set (melting temperature 312.9 K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProteinThermo {
    pub gas_constant_j_per_mol_k: f64,
    pub melting_k: f64,
    pub fold_dh_j_per_mol: f64,
    pub fold_ds_j_per_mol_k: f64,
    pub fold_dcp_j_per_mol_k: f64,
    pub unfold_dh_j_per_mol: f64,
    pub unfold_ds_j_per_mol_k: f64,
    pub unfold_dcp_j_per_mol_k: f64,
}

impl Default for ProteinThermo {
    fn default() -> Self {
        Self {
            gas_constant_j_per_mol_k: 8.314,
            melting_k: 312.9,
            fold_dh_j_per_mol: -333e3,
            fold_ds_j_per_mol_k: -1.18e3,
            fold_dcp_j_per_mol_k: -48e3,
            unfold_dh_j_per_mol: 337e3,
            unfold_ds_j_per_mol_k: 0.96e3,
            unfold_dcp_j_per_mol_k: -38e3,
        }
    }
}

impl ProteinThermo {
    /// `ln(k0 / k)` for the given enthalpy, entropy and heat-capacity change.
    fn log_ratio(&self, kelvin: f64, dh: f64, ds: f64, dcp: f64) -> f64 {
        let tm = self.melting_k;
        let heat_capacity_term = kelvin - tm + kelvin * (tm / kelvin).ln();
        (dh - kelvin * ds + dcp * heat_capacity_term) / (self.gas_constant_j_per_mol_k * kelvin)
    }

    /// `ln(k0 / k_f)`.
    pub fn log_fold_ratio(&self, kelvin: f64) -> f64 {
        self.log_ratio(kelvin, self.fold_dh_j_per_mol, self.fold_ds_j_per_mol_k, self.fold_dcp_j_per_mol_k)
    }

    /// `ln(k0 / k_u)`.
    pub fn log_unfold_ratio(&self, kelvin: f64) -> f64 {
        self.log_ratio(kelvin, self.unfold_dh_j_per_mol, self.unfold_ds_j_per_mol_k, self.unfold_dcp_j_per_mol_k)
    }

    pub fn folding_fn(&self, schedule: &TemperatureSchedule) -> RateFn {
        let (thermo, sched) = (*self, schedule.clone());
        RateFn::new(move |t| protein_rates(&thermo, sched.at(t)).0).with_breakpoints(schedule.breakpoints())
    }

    pub fn unfolding_fn(&self, schedule: &TemperatureSchedule) -> RateFn {
        let (thermo, sched) = (*self, schedule.clone());
        RateFn::new(move |t| protein_rates(&thermo, sched.at(t)).1).with_breakpoints(schedule.breakpoints())
    }
}

/// Solvent viscosity law in the units of the original fit (`T` in Kelvin,
/// converted to °C internally).
pub fn viscosity(kelvin: f64) -> f64 {
    let celsius = kelvin - ZERO_CELSIUS;
    0.226 + 1.0723 * (-(celsius - 10.0) / 33.0).exp()
}

/// Rate prefactor `k0 = (10 us)^-1 * eta(22 °C) / eta(T)` in Hz.
pub fn viscosity_prefactor(kelvin: f64) -> f64 {
    let reference = viscosity(ZERO_CELSIUS + 22.0);
    1e5 * reference / viscosity(kelvin)
}

/// Folding and unfolding rates `(k_f, k_u)` in Hz at temperature `kelvin`.
pub fn protein_rates(thermo: &ProteinThermo, kelvin: f64) -> (f64, f64) {
    let k0 = viscosity_prefactor(kelvin);
    (k0 * (-thermo.log_fold_ratio(kelvin)).exp(), k0 * (-thermo.log_unfold_ratio(kelvin)).exp())
}

/// Intra-basin profile of the unfolded basin: level 0 is `k_u^(1/4)`, level 1
/// is `k_u^(1/2)`, both taken as numbers in Hz; deeper levels repeat level 1.
pub fn protein_radial_profile(thermo: &ProteinThermo, schedule: &TemperatureSchedule) -> RadialProfile {
    let ku = thermo.unfolding_fn(schedule);
    RadialProfile::new(vec![ku.powf(0.25), ku.powf(0.5)], TailRule::ConstantExtend).expect("two levels given")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_capacity_bracket_vanishes_at_melting() {
        let th = ProteinThermo::default();
        let tm = th.melting_k;
        let bracket = tm - tm + tm * (tm / tm).ln();
        assert_eq!(bracket, 0.0);
        // Only the enthalpy/entropy terms remain.
        let f = (th.fold_dh_j_per_mol - tm * th.fold_ds_j_per_mol_k) / (th.gas_constant_j_per_mol_k * tm);
        assert!((th.log_fold_ratio(tm) - f).abs() < 1e-12);
    }

    #[test]
    fn log_ratios_at_melting() {
        let th = ProteinThermo::default();
        let lf = th.log_fold_ratio(th.melting_k);
        let lu = th.log_unfold_ratio(th.melting_k);
        assert!((lf - 13.92).abs() < 0.01, "{lf}");
        assert!((lu - 14.07).abs() < 0.01, "{lu}");
        let (kf, ku) = protein_rates(&th, th.melting_k);
        assert!((kf / ku - (lu - lf).exp()).abs() < 1e-12);
        assert!((kf / ku - 1.16).abs() < 0.01);
    }

    #[test]
    fn crossing_direction_near_melting() {
        let th = ProteinThermo::default();
        let tm = th.melting_k;
        let (kf, ku) = protein_rates(&th, tm - 0.5);
        assert!(kf > ku);
        let h = 1e-3;
        let g = |t: f64| {
            let (kf, ku) = protein_rates(&th, t);
            (ku / kf).ln()
        };
        assert!((g(tm + h) - g(tm - h)) / (2.0 * h) > 0.0);
        let (kf, ku) = protein_rates(&th, tm + 1.0);
        assert!(ku > kf);
    }

    #[test]
    fn prefactor_reference_point() {
        assert!((viscosity_prefactor(ZERO_CELSIUS + 22.0) - 1e5).abs() < 1e-9);
        let eta22 = viscosity(ZERO_CELSIUS + 22.0);
        assert!((eta22 - (0.226 + 1.0723 * (-12.0f64 / 33.0).exp())).abs() < 1e-15);
        assert!((eta22 - 0.9714).abs() < 1e-3);
    }

    #[test]
    fn prefactor_increases_with_temperature() {
        let mut prev = 0.0;
        for c in 10..=50 {
            let k0 = viscosity_prefactor(ZERO_CELSIUS + f64::from(c));
            assert!(k0 > prev);
            prev = k0;
        }
    }

    #[test]
    fn rates_positive_and_continuous() {
        let th = ProteinThermo::default();
        let mut prev = protein_rates(&th, 280.0);
        for k in 1..=5000 {
            let t = 280.0 + 50.0 * k as f64 / 5000.0;
            let cur = protein_rates(&th, t);
            assert!(cur.0 > 0.0 && cur.1 > 0.0);
            assert!((cur.0 / prev.0 - 1.0).abs() < 0.05);
            assert!((cur.1 / prev.1 - 1.0).abs() < 0.05);
            prev = cur;
        }
    }

    #[test]
    fn radial_profile_powers() {
        let th = ProteinThermo::default();
        let sched = TemperatureSchedule::linear(309.0, 316.15, 50.0).unwrap();
        let prof = protein_radial_profile(&th, &sched);
        for t in [0.0, 17.0, 50.0] {
            let ku = protein_rates(&th, sched.at(t)).1;
            assert!((prof.rate(0, t).unwrap() - ku.powf(0.25)).abs() < 1e-15);
            assert!((prof.rate(1, t).unwrap() - ku.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_levels_exceed_basin_rates_most_of_the_time() {
        let th = ProteinThermo::default();
        let sched = TemperatureSchedule::linear(309.0, 316.15, 50.0).unwrap();
        let prof = protein_radial_profile(&th, &sched);
        let samples = 501;
        let above = (0..samples)
            .filter(|&k| {
                let t = 50.0 * k as f64 / (samples - 1) as f64;
                let (kf, ku) = protein_rates(&th, sched.at(t));
                let lo = prof.rate(0, t).unwrap().min(prof.rate(1, t).unwrap());
                lo > kf && lo > ku
            })
            .count();
        assert!(above * 2 > samples);
    }

    #[test]
    fn unit_fixed_point_of_powers() {
        let one = RateFn::constant(1.0);
        assert_eq!(one.powf(0.25).eval(0.0), 1.0);
        let sixteen = RateFn::constant(16.0);
        assert_eq!(sixteen.powf(0.25).eval(0.0), 2.0);
        assert_eq!(sixteen.powf(0.5).eval(0.0), 4.0);
    }
}
