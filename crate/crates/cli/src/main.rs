//! `weq-arrival`: batch runs of the two-particle arrival-time simulations.

mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "weq-arrival", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Further settings as `--key value`, applied after the file.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--KEY VALUE"
    )]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Arrival-time distributions, one table per z_ca.
    ArrivalDist(Common),
    /// Mean arrival times and overlaps for each z_ca in both scenarios.
    Tables(Common),
    /// Mean arrival times and density moments versus mass.
    MassSweep(Common),
    /// Spin-dependent versus Schrodinger mean arrival times versus mass.
    SpinSweep(Common),
    /// Invariant, oracle and regression checks.
    Verify(Common),
}

fn load(common: &Common) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    let overrides = config::parse_overrides(&common.overrides)?;
    let file = overrides
        .iter()
        .rev()
        .find(|s| s.key == "config")
        .map(|s| PathBuf::from(&s.value))
        .or_else(|| common.config.clone());
    if let Some(path) = file {
        cfg.apply(&config::read_file(&path)?)?;
    }
    let rest: Vec<_> = overrides
        .into_iter()
        .filter(|s| s.key != "config")
        .collect();
    cfg.apply(&rest)?;
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::ArrivalDist(c) => commands::arrival_dist(&load(&c)?),
        Command::Tables(c) => commands::tables(&load(&c)?),
        Command::MassSweep(c) => commands::mass_sweep_cmd(&load(&c)?),
        Command::SpinSweep(c) => commands::spin_sweep(&load(&c)?),
        Command::Verify(c) => verify::verify(&load(&c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weq-arrival: {e}");
            e.exit_code()
        }
    }
}
