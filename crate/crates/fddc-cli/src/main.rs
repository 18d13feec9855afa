//! `fddc` — frequency-domain data-driven control toolkit.
//!
//! Every subcommand reads a single JSON config file and writes its
//! results (CSV/JSON) under `--out`. All randomness is seeded through the
//! config (or `--seed`), so identical invocations produce byte-identical
//! files. On failure a machine-readable error JSON goes to stderr and the
//! exit code is nonzero.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use commands::Context;

#[derive(Parser)]
#[command(name = "fddc", version, about = "Characterize, simulate and control LTI systems from frequency-domain data")]
struct Cli {
    /// Output directory for result files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override solver/consistency tolerances in the config.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a spectra dataset (noise-free direct mode or a closed-loop campaign).
    GenData {
        #[arg(long)]
        config: PathBuf,
    },
    /// Test persistence of excitation of a dataset or trajectory.
    CheckPe {
        #[arg(long)]
        config: PathBuf,
    },
    /// Data-driven simulation from a past window and future inputs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the transfer function at arbitrary complex frequencies.
    Freqresp {
        #[arg(long)]
        config: PathBuf,
    },
    /// Data-driven LQR from input-state spectra.
    Lqr {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-loop run of the frequency-domain predictive controller.
    Freepc {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-loop run of the time-domain (Hankel) predictive controller.
    Deepc {
        #[arg(long)]
        config: PathBuf,
    },
    /// Seeded Monte Carlo sweep of the predictive controller over dataset sizes.
    MonteCarlo {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-loop FRF estimation with per-period averaging and variance.
    EstimateFrf {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Context { out_dir: cli.out, seed_override: cli.seed, tolerance_override: cli.tolerance };
    let result = match &cli.command {
        Command::GenData { config } => commands::cmd_gen_data(&ctx, config),
        Command::CheckPe { config } => commands::cmd_check_pe(&ctx, config),
        Command::Simulate { config } => commands::cmd_simulate(&ctx, config),
        Command::Freqresp { config } => commands::cmd_freqresp(&ctx, config),
        Command::Lqr { config } => commands::cmd_lqr(&ctx, config),
        Command::Freepc { config } => commands::cmd_freepc(&ctx, config),
        Command::Deepc { config } => commands::cmd_deepc(&ctx, config),
        Command::MonteCarlo { config } => commands::cmd_monte_carlo(&ctx, config),
        Command::EstimateFrf { config } => commands::cmd_estimate_frf(&ctx, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
