//! Experiment driver for private Bayesian inference: configuration, event
//! ingestion, synthetic data, experiment runners and result files.

pub mod config;
pub mod events;
pub mod experiments;
pub mod output;
pub mod synth;

use std::path::PathBuf;

use anyhow::Result;
use privbayes::rng::stream_rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiments::{adversarial, are, beta_demo, hmm, ledgers_json};
use crate::output::{events_csv, OutputDir};

/// Subcommands, each writing to `<out>/<experiment>/`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BetaDemo,
    Are,
    Adversarial,
    HmmFit,
    HmmEval,
    Synth,
}

impl Command {
    pub fn experiment(self) -> &'static str {
        match self {
            Command::BetaDemo => "beta_demo",
            Command::Are => "are",
            Command::Adversarial => "adversarial",
            Command::HmmFit => "hmm_fit",
            Command::HmmEval => "hmm_eval",
            Command::Synth => "synth",
        }
    }
}

/// Run `cmd` under `cfg` and return the output directory.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let out = OutputDir::create(&cfg.out_dir, cmd.experiment(), cfg)?;
    privbayes::parallel::with_threads(cfg.threads, || match cmd {
        Command::BetaDemo => write_beta_demo(cfg, &out),
        Command::Are => write_are(cfg, &out),
        Command::Adversarial => write_adversarial(cfg, &out),
        Command::HmmFit => write_hmm_fit(cfg, &out),
        Command::HmmEval => write_hmm_eval(cfg, &out),
        Command::Synth => write_synth(cfg, &out),
    })?;
    Ok(out.path().to_path_buf())
}

fn f(x: f64) -> String {
    x.to_string()
}

fn write_beta_demo(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let r = beta_demo::run_beta_demo(&cfg.beta_demo, cfg.seed)?;
    let mut header = vec!["p".to_owned(), "true".to_owned(), "ops".to_owned()];
    header.extend((1..=r.laplace_densities.len()).map(|i| format!("laplace_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..r.grid.len())
        .map(|i| {
            [r.grid[i], r.true_density[i], r.ops_density[i]]
                .into_iter()
                .chain(r.laplace_densities.iter().map(|c| c[i]))
                .map(f)
                .collect()
        })
        .collect();
    out.write_csv("results.csv", &header, &rows)?;
    out.write_json("ledger.json", &ledgers_json(&r.ledgers))?;
    out.write_json(
        "report.json",
        &json!({ "config": cfg.beta_demo, "seed": cfg.seed, "summary": r.summary }),
    )?;
    Ok(())
}

fn write_are(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let r = are::run_are(&cfg.are, cfg.seed)?;
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|x| {
            vec![
                x.method.to_owned(),
                x.n.to_string(),
                f(x.mean_l1),
                f(x.stderr),
            ]
        })
        .collect();
    out.write_csv(
        "results.csv",
        &["method", "n", "mean_l1_error", "stderr"],
        &rows,
    )?;
    out.write_json("ledger.json", &ledgers_json(&r.ledgers))?;
    out.write_json(
        "report.json",
        &json!({ "config": cfg.are, "seed": cfg.seed, "ops": r.ops }),
    )?;
    Ok(())
}

fn write_adversarial(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let rows = adversarial::run_adversarial(&cfg.adversarial)?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let chosen = match r.chosen {
                Some(true) => "success",
                Some(false) => "failure",
                None => "",
            };
            vec![
                r.step.to_string(),
                r.successes.to_string(),
                r.failures.to_string(),
                f(r.local_epsilon),
                chosen.to_owned(),
                f(r.bound),
            ]
        })
        .collect();
    out.write_csv(
        "results.csv",
        &[
            "step",
            "successes",
            "failures",
            "local_epsilon",
            "chosen",
            "bound",
        ],
        &csv,
    )?;
    out.write_json("ledger.json", &json!({}))?;
    let last = rows.last().expect("step 0 is always present");
    out.write_json(
        "report.json",
        &json!({
            "config": cfg.adversarial,
            "bound": last.bound,
            "final_local_epsilon": last.local_epsilon,
            "final_fraction_of_bound": last.local_epsilon / last.bound,
        }),
    )?;
    Ok(())
}

fn write_hmm_fit(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let input = hmm::load_hmm_input(&cfg.hmm, &cfg.synth, cfg.seed)?;
    let r = hmm::run_hmm_fit(&cfg.hmm, &input, cfg.seed)?;
    out.write_csv(
        "results.csv",
        &["mode", "epsilon", "region", "timestep", "state"],
        &r.assignments,
    )?;
    out.write_csv(
        "theta.csv",
        &[
            "mode",
            "epsilon",
            "state",
            "feature",
            "outcome",
            "probability",
        ],
        &r.theta,
    )?;
    let ledgers = r
        .jobs
        .iter()
        .zip(&r.fits)
        .map(|(j, fit)| (j.name(), fit.ledger.clone()))
        .collect();
    out.write_json("ledger.json", &ledgers_json(&ledgers))?;
    out.write_json(
        "report.json",
        &json!({
            "config": cfg.hmm,
            "seed": cfg.seed,
            "input": input.report,
            "truth": input.truth,
            "jobs": r.summaries,
        }),
    )?;
    Ok(())
}

fn write_hmm_eval(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let input = hmm::load_hmm_input(&cfg.hmm, &cfg.synth, cfg.seed)?;
    let r = hmm::run_hmm_eval(&cfg.hmm, &input.data, cfg.seed)?;
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|x| {
            vec![
                x.mode.clone(),
                f(x.epsilon),
                f(x.mean_heldout_loglik),
                f(x.stderr),
                x.splits.to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "results.csv",
        &["mode", "epsilon", "mean_heldout_loglik", "stderr", "splits"],
        &rows,
    )?;
    out.write_json("ledger.json", &r.ledgers)?;
    out.write_json(
        "report.json",
        &json!({
            "config": cfg.hmm,
            "seed": cfg.seed,
            "input": input.report,
            "heldout_cells": r.heldout_cells,
            "scores": r.scores,
        }),
    )?;
    Ok(())
}

fn write_synth(cfg: &ExperimentConfig, out: &OutputDir) -> Result<()> {
    let s = synth::synth_generate(&cfg.synth, &mut stream_rng(hmm::synth_seed(cfg.seed), 0))?;
    out.write_text("results.csv", &events_csv(&s.events, out.comment())?)?;
    let t = cfg.synth.n_timesteps;
    let truth: Vec<Vec<String>> =
        s.z.iter()
            .enumerate()
            .map(|(c, k)| {
                vec![
                    s.events.regions[c / t].clone(),
                    (c % t).to_string(),
                    k.to_string(),
                ]
            })
            .collect();
    out.write_csv("truth.csv", &["region", "timestep", "state"], &truth)?;
    out.write_json("ledger.json", &json!({}))?;
    out.write_json(
        "report.json",
        &json!({
            "config": cfg.synth,
            "seed": cfg.seed,
            "records": s.events.records.len(),
            "transition": s.transition,
            "theta": s.theta,
        }),
    )?;
    Ok(())
}
