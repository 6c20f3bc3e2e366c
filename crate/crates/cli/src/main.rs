use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use privbayes_cli::config::ExperimentConfig;
use privbayes_cli::{run, Command};

/// Differentially private Bayesian inference experiments.
#[derive(Parser)]
#[command(name = "privbayes", version)]
struct Cli {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core (overrides the config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact, OPS and Laplace posterior densities for a small dataset.
    BetaDemo,
    /// Estimation error against dataset size for each estimator.
    Are,
    /// Greedy worst-case data for the truncated posterior.
    Adversarial,
    /// HMM case study.
    Hmm {
        #[command(subcommand)]
        action: HmmCmd,
    },
    /// Generate a synthetic event CSV from the HMM.
    Synth,
}

#[derive(Subcommand)]
enum HmmCmd {
    /// Fit every mode and budget; write state assignments and θ.
    Fit,
    /// Held-out log-likelihood over train/test splits.
    Eval,
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    let cmd = match cli.command {
        Cmd::BetaDemo => Command::BetaDemo,
        Cmd::Are => Command::Are,
        Cmd::Adversarial => Command::Adversarial,
        Cmd::Hmm {
            action: HmmCmd::Fit,
        } => Command::HmmFit,
        Cmd::Hmm {
            action: HmmCmd::Eval,
        } => Command::HmmEval,
        Cmd::Synth => Command::Synth,
    };
    let dir = run(cmd, &cfg)?;
    println!("{}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
