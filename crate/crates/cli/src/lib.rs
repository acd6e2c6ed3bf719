//! Command-line front end: configuration parsing, subcommand drivers and CSV
//! output for the `nonlocal-lwr` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{CliError, CliResult, Context};
pub use config::{parse_config, ConfigError, RunConfig};

pub const OUT_ENV: &str = "NONLOCAL_LWR_OUT";

#[derive(Debug, Parser)]
#[command(name = "nonlocal-lwr", version, about = "Non-local LWR traffic flow with a discontinuous velocity field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (flat `key = value` text).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; the NONLOCAL_LWR_OUT environment variable takes precedence.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized verification corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the configured scenario and write snapshots and diagnostics.
    Run,
    /// Audit bounds, mass balance, convolution bounds, entropy inequalities and traces.
    Verify,
    /// Distance between viscous and hyperbolic solutions for decreasing viscosities.
    ViscositySweep,
    /// Observed L1 convergence order over successively halved grids.
    Refine,
    /// L1 distance between the scenario and a perturbed copy.
    Stability,
    /// Local-model Riemann problem written alongside its exact solution.
    Counterexample,
}

fn load(path: &std::path::Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

/// Output directory: environment variable, then `--out`, then `output.dir`,
/// then `./out`.
pub fn resolve_out_dir(env: Option<OsString>, flag: Option<PathBuf>, config: Option<&RunConfig>) -> PathBuf {
    env.filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(flag)
        .or_else(|| config.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn execute(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let config = match &cli.config {
        Some(path) => Some(load(path)?),
        None if cli.command == Command::Counterexample => None,
        None => return Err(CliError::Usage("--config <path> is required".into())),
    };
    let ctx = Context {
        out_dir: resolve_out_dir(std::env::var_os(OUT_ENV), cli.out.clone(), config.as_ref()),
        seed: cli.seed,
    };
    match (cli.command, config.as_ref()) {
        (Command::Counterexample, c) => commands::cmd_counterexample(c, &ctx),
        (Command::Run, Some(c)) => commands::cmd_run(c, &ctx),
        (Command::Verify, Some(c)) => commands::cmd_verify(c, &ctx),
        (Command::ViscositySweep, Some(c)) => commands::cmd_viscosity_sweep(c, &ctx),
        (Command::Refine, Some(c)) => commands::cmd_refine(c, &ctx),
        (Command::Stability, Some(c)) => commands::cmd_stability(c, &ctx),
        (_, None) => unreachable!("configuration checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn environment_overrides_flag() {
        let dir = resolve_out_dir(Some("envdir".into()), Some("flagdir".into()), None);
        assert_eq!(dir, PathBuf::from("envdir"));
        assert_eq!(resolve_out_dir(None, Some("flagdir".into()), None), PathBuf::from("flagdir"));
        assert_eq!(resolve_out_dir(Some("".into()), None, None), PathBuf::from("out"));
    }

    #[test]
    fn cli_parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["nonlocal-lwr", "verify", "--config", "a.cfg", "--seed", "3", "--jobs", "2"]).unwrap();
        assert_eq!(cli.command, Command::Verify);
        assert_eq!(cli.seed, Some(3));
        assert_eq!(cli.jobs, Some(2));
        assert!(Cli::try_parse_from(["nonlocal-lwr", "viscosity-sweep"]).is_ok());
        assert!(Cli::try_parse_from(["nonlocal-lwr", "fly"]).is_err());
    }
}
