use std::path::PathBuf;
use std::process::ExitCode;

use axisym_core::cli::{self, RunConfig};
use axisym_core::error::{Error, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "axisym", version, about = "Axisymmetric swirling-flow solver with a priori estimate checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// `section.key=value`, repeatable; e.g. `grid.nr=64` or `overrides.amplitude=2`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and check the estimates along the run.
    Run(Common),
    /// Run the flow-free inequality and elliptic suites.
    Check(Common),
    /// Grid-convergence study of the elliptic and transport solvers.
    Convergence(Common),
}

fn load(c: &Common) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&c.config).map_err(|e| Error::Config(format!("reading {}: {e}", c.config.display())))?;
    let mut overrides = c.overrides.clone();
    if let Some(seed) = c.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut cfg = cli::parse_config(&text, &overrides)?;
    if let Some(out) = &c.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (common, cmd): (&Common, fn(&RunConfig) -> Result<i32>) = match &args.command {
        Command::Run(c) => (c, cli::cmd_run),
        Command::Check(c) => (c, cli::cmd_check),
        Command::Convergence(c) => (c, cli::cmd_convergence),
    };
    let code = cli::exit_code(load(common).and_then(|cfg| cmd(&cfg)));
    ExitCode::from(code as u8)
}
