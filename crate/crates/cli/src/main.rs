use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padic_kinetics::scenario::{
    run_custom, run_glass_scenario, run_mc, run_oracle_compare, run_protein_scenario, RunReport, ScenarioConfig,
};
use padic_kinetics::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "padic-kinetics", version, about = "Relaxation on p-adic energy landscapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON scenario file; the built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "PADIC_KINETICS_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides the oracle seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Glass cooling: quench-depth sweep of p1(t) and S(t).
    Glass(Common),
    /// Protein folding under a heating ramp.
    Protein(Common),
    /// Checks the spectral solver against the dense oracle and sampled paths.
    OracleCompare {
        #[command(flatten)]
        common: Common,
        /// Overrides the number of Monte Carlo paths (0 skips sampling).
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Monte Carlo simulation of the jump process.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Arbitrary landscape model from a config file.
    Custom(Common),
}

fn load(path: Option<&Path>, default: Defaults) -> Result<ScenarioConfig, Error> {
    match path {
        None => Ok(default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io { path: p.to_path_buf(), source })?;
            ScenarioConfig::from_json(&text)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Json(_) | Error::Usage(_) => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::Quadrature { .. } | Error::StepRejected { .. } | Error::ThinningBound { .. } | Error::Tolerance(_) => {
            EXIT_TOLERANCE
        }
    }
}

type Defaults = fn() -> ScenarioConfig;
type Runner = fn(&ScenarioConfig) -> Result<RunReport, Error>;

fn execute(cli: Cli) -> Result<RunReport, Error> {
    let (common, paths, default, runner): (Common, Option<usize>, Defaults, Runner) = match cli.command {
        Command::Glass(c) => (c, None, ScenarioConfig::glass_default, run_glass_scenario),
        Command::Protein(c) => (c, None, ScenarioConfig::protein_default, run_protein_scenario),
        Command::OracleCompare { common, paths } => (common, paths, ScenarioConfig::glass_default, run_oracle_compare),
        Command::Mc { common, paths } => (common, paths, ScenarioConfig::protein_default, run_mc),
        Command::Custom(c) => {
            if c.config.is_none() {
                return Err(Error::Usage("custom needs --config".into()));
            }
            (c, None, ScenarioConfig::protein_default, run_custom)
        }
    };
    let mut cfg = load(common.config.as_deref(), default)?;
    if let Some(seed) = common.seed {
        cfg.oracle.seed = seed;
    }
    if let Some(paths) = paths {
        cfg.oracle.paths = paths;
    }
    cfg.validate()?;
    let report = runner(&cfg)?;
    for path in report.bundle.write(&common.out)? {
        println!("wrote {}", path.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            for check in &report.checks {
                println!("[{}] {}: {}", if check.passed { "pass" } else { "FAIL" }, check.name, check.detail);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_TOLERANCE)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
