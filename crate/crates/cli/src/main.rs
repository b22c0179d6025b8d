use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, ValueEnum};
use nlqw_cli::{dispatch, parse_config, Overrides, Subcommand};
use nlqw_core::sweeps::Scale;

const CONFIG_ERROR: u8 = 1;
const COMPUTATION_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nlqw",
    version,
    about = "Nonlinear discrete-time quantum walks: edge states, stability, dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Subcommand)]
enum Cmd {
    /// Evolve a Gaussian state and track edge-state fidelities
    Evolve(Common),
    /// Spectra of the linearized map over a κ grid
    Stability(Common),
    /// Matched eigenvalue trajectories over a κ grid
    Flow(Common),
    /// Phase-diagram grid over (angle, κ)
    Sweep(Common),
    /// Continuum frequencies and PT phase over (q, κ)
    Continuum(Common),
    /// Analytic edge-state amplitudes
    Edgestate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core (overrides `workers`)
    #[arg(long)]
    workers: Option<usize>,
    /// Default sizes for lattices and run lengths (overrides `scale`)
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CONFIG_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (sub, common) = match cli.command {
        Cmd::Evolve(c) => (Subcommand::Evolve, c),
        Cmd::Stability(c) => (Subcommand::Stability, c),
        Cmd::Flow(c) => (Subcommand::Flow, c),
        Cmd::Sweep(c) => (Subcommand::Sweep, c),
        Cmd::Continuum(c) => (Subcommand::Continuum, c),
        Cmd::Edgestate(c) => (Subcommand::EdgeState, c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let overrides = Overrides {
        out: common.out,
        workers: common.workers,
        scale: common.scale.map(|s| match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        }),
    };
    let config = match parse_config(sub, &text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match dispatch(&config) {
        Ok(outcome) if outcome.failures.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("failure: {f}");
            }
            ExitCode::from(COMPUTATION_ERROR)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(COMPUTATION_ERROR)
        }
    }
}
