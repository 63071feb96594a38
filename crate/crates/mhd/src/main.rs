use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod commands;

/// Pseudo-spectral simulator of bipolar shear-thinning MHD.
#[derive(Debug, Parser)]
#[command(name = "bipolar-mhd", version, about)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one config value, e.g. `--set physics.alpha=0.3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for ensemble work.
    #[arg(long, global = true, env = "BIPOLAR_MHD_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the system, writing energy CSV, checkpoints and the absorbing-ball report.
    Simulate,
    /// Evaluate the attractor dimension bound and the estimate chain.
    Bound,
    /// Compare finite differences of the flow against the tangent dynamics.
    Tangent,
    /// Estimate the volume-contraction trace q_m along a trajectory.
    Lyapunov,
    /// Evaluate the constants of the stronger-norm absorbing ball.
    Kappa,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let cfg = bipolar_mhd::config::RunConfig::load(cli.config.as_deref(), &cli.set)?.validated()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &mut out),
        Command::Bound => commands::bound(&cfg, &mut out),
        Command::Tangent => commands::tangent(&cfg, &mut out),
        Command::Lyapunov => commands::lyapunov(&cfg, &mut out),
        Command::Kappa => commands::kappa(&cfg, &mut out),
    }
}
