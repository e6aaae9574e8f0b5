//! Shared fixtures for the benchmarks.

use padic_kinetics::basin::Basin;
use padic_kinetics::padic::{BallSpec, Prime, RadialProfile, TailRule};
use padic_kinetics::rates::RateFn;
use padic_kinetics::scenario::ScenarioConfig;
use padic_kinetics::LandscapeModel;

/// Glass model cooling from 300 K to 200 K.
pub fn glass_model() -> LandscapeModel {
    ScenarioConfig::glass_default().model().expect("default config builds")
}

pub fn glass_ball() -> BallSpec {
    ScenarioConfig::glass_default().initial().expect("default ball")
}

/// Autonomous two-basin model with `O(1)` rates on `[0, horizon]`.
pub fn autonomous_model(p: u32, horizon: f64) -> LandscapeModel {
    let prof = RadialProfile::constant_levels(&[1.5, 0.8, 0.4], TailRule::ConstantExtend).expect("levels");
    LandscapeModel::new(
        Prime::new(p).expect("prime"),
        vec![Basin { label: "U".into(), profile: prof.clone() }, Basin { label: "F".into(), profile: prof }],
        (0.0, horizon),
    )
    .and_then(|m| m.with_rate(0, 1, RateFn::constant(0.6)))
    .and_then(|m| m.with_rate(1, 0, RateFn::constant(0.3)))
    .expect("valid model")
}
