//! Scenario configuration, the glass and protein experiments, oracle
//! comparison runs and CSV emission.

mod config;
mod output;
mod run;

pub use config::{
    BasinConfig, GlassSweep, GridSpec, InitialBall, InterRate, MeanMethodChoice, OracleConfig, RateLabeling, RateLaw,
    ScenarioConfig, SolverConfig,
};
pub use output::{emit_csv, version_string, CsvSeries, OutputBundle};
pub use run::{
    exponential_mixture_residual, labeled_rates, run_custom, run_glass_scenario, run_mc, run_oracle_compare,
    run_protein_scenario, spectral_trajectory, Check, RunReport,
};
