//! HMM case study: fit every inference mode across the budget grid, and
//! score held-out cells over random train/test splits.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use privbayes::hmm::{fit, heldout_loglik, FitMode, FitResult, HmmConfig, HmmData};
use privbayes::parallel::map_streams;
use privbayes::rng::{derive_seed, stream_rng};
use privbayes::PrivacyCost;
use rand::seq::index::sample;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{HmmExperimentConfig, HmmModeSpec};
use crate::events::{load_events_csv, preprocess, to_hmm_data, EventSet};
use crate::experiments::mean_stderr;
use crate::synth::{synth_generate, SynthConfig};

const SYNTH_STREAMS: u64 = 1;
const FIT_STREAMS: u64 = 2;
const SPLIT_STREAMS: u64 = 3;
const EVAL_STREAMS: u64 = 4;

/// Seed of the synthetic data stream, shared by `synth` and `hmm`.
pub fn synth_seed(seed: u64) -> u64 {
    derive_seed(seed, SYNTH_STREAMS)
}

/// Synthetic ground truth carried along for scoring.
#[derive(Debug, Clone, Serialize)]
pub struct Truth {
    pub z: Vec<usize>,
    pub transition: Vec<Vec<f64>>,
    pub theta: Vec<Vec<Vec<f64>>>,
}

pub struct HmmInput {
    pub events: EventSet,
    pub data: HmmData,
    pub truth: Option<Truth>,
    /// Loading and preprocessing summary.
    pub report: Value,
}

/// Load and preprocess the configured CSV, or generate synthetic data.
pub fn load_hmm_input(
    cfg: &HmmExperimentConfig,
    synth: &SynthConfig,
    seed: u64,
) -> Result<HmmInput> {
    match &cfg.input {
        Some(path) => {
            let (raw, load) = load_events_csv(path, cfg.feature_domains.as_deref())?;
            let (events, prep) = preprocess(&raw, &cfg.preprocess)?;
            let data = to_hmm_data(&events)?;
            let report = json!({ "source": path, "load": load, "preprocess": prep });
            Ok(HmmInput {
                events,
                data,
                truth: None,
                report,
            })
        }
        None => {
            let out = synth_generate(synth, &mut stream_rng(synth_seed(seed), 0))?;
            let data = to_hmm_data(&out.events)?;
            let report = json!({ "source": "synthetic", "synth": synth, "records": out.events.records.len() });
            let truth = Truth {
                z: out.z,
                transition: out.transition,
                theta: out.theta,
            };
            Ok(HmmInput {
                events: out.events,
                data,
                truth: Some(truth),
                report,
            })
        }
    }
}

/// One fitted configuration: a mode, and a budget unless non-private.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub mode: HmmModeSpec,
    pub epsilon: Option<f64>,
}

impl Job {
    pub fn name(&self) -> String {
        match self.epsilon {
            Some(e) => format!("{} eps={e}", self.mode.name()),
            None => self.mode.name(),
        }
    }

    pub fn fit_mode(&self) -> FitMode {
        match (self.mode, self.epsilon) {
            (HmmModeSpec::Laplace, Some(epsilon)) => FitMode::Laplace { epsilon },
            (HmmModeSpec::Ops { .. }, Some(epsilon)) => FitMode::Ops { epsilon },
            _ => FitMode::Nonprivate,
        }
    }

    pub fn model(&self, cfg: &HmmExperimentConfig, feature_dims: &[usize]) -> Result<HmmConfig> {
        let base = HmmConfig::new(cfg.n_states, feature_dims.to_vec(), cfg.alpha, cfg.beta)?;
        Ok(match self.mode {
            HmmModeSpec::Ops { multiplier } => base.with_ops_trunc(multiplier)?,
            _ => base,
        })
    }

    fn epsilon_field(&self) -> String {
        self.epsilon.map(|e| e.to_string()).unwrap_or_default()
    }
}

/// Non-private once, every private mode at every budget.
pub fn jobs(cfg: &HmmExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &mode in &cfg.modes {
        match mode {
            HmmModeSpec::Nonprivate => out.push(Job {
                mode,
                epsilon: None,
            }),
            _ => out.extend(cfg.epsilons.iter().map(|&e| Job {
                mode,
                epsilon: Some(e),
            })),
        }
    }
    out
}

fn fit_job(
    job: &Job,
    cfg: &HmmExperimentConfig,
    data: &HmmData,
    rng: &mut privbayes::PrivRng,
) -> Result<FitResult> {
    let model = job.model(cfg, data.feature_dims())?;
    Ok(fit(
        &model,
        data,
        job.fit_mode(),
        cfg.n_iters,
        cfg.burn_in,
        rng,
    )?)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Fraction of cells on which `a` and `b` agree under the best relabeling
/// of `a`.
pub fn aligned_accuracy(a: &[usize], b: &[usize], n_states: usize) -> f64 {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 1.0;
    }
    let best = permutations(n_states)
        .iter()
        .map(|perm| a.iter().zip(b).filter(|(&x, &y)| perm[x] == y).count())
        .max()
        .unwrap_or(0);
    best as f64 / a.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct JobSummary {
    pub name: String,
    pub mode: String,
    pub epsilon: Option<f64>,
    pub total_cost: PrivacyCost,
    pub converged_cost: Option<PrivacyCost>,
    pub clamp_fired: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy_vs_truth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_with_nonprivate: Option<f64>,
}

pub struct HmmFitOutput {
    pub jobs: Vec<Job>,
    pub fits: Vec<FitResult>,
    pub summaries: Vec<JobSummary>,
    /// `(mode, epsilon, region, timestep, state)`.
    pub assignments: Vec<Vec<String>>,
    /// `(mode, epsilon, state, feature, outcome, probability)`.
    pub theta: Vec<Vec<String>>,
}

pub fn run_hmm_fit(cfg: &HmmExperimentConfig, input: &HmmInput, seed: u64) -> Result<HmmFitOutput> {
    let jobs = jobs(cfg);
    let fits: Vec<FitResult> = map_streams(derive_seed(seed, FIT_STREAMS), jobs.len(), |i, rng| {
        fit_job(&jobs[i], cfg, &input.data, rng)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let reference = jobs
        .iter()
        .position(|j| j.mode == HmmModeSpec::Nonprivate)
        .map(|i| &fits[i].z_mode);
    let k = cfg.n_states;
    let summaries = jobs
        .iter()
        .zip(&fits)
        .map(|(job, f)| JobSummary {
            name: job.name(),
            mode: job.mode.name(),
            epsilon: job.epsilon,
            total_cost: f.total_cost,
            converged_cost: f.converged_cost,
            clamp_fired: f.clamp_fired,
            accuracy_vs_truth: input
                .truth
                .as_ref()
                .map(|t| aligned_accuracy(&f.z_mode, &t.z, k)),
            agreement_with_nonprivate: reference
                .filter(|_| job.mode != HmmModeSpec::Nonprivate)
                .map(|z| aligned_accuracy(&f.z_mode, z, k)),
        })
        .collect();

    let (n_r, n_t) = (input.data.n_regions(), input.data.n_timesteps());
    let mut assignments = Vec::with_capacity(jobs.len() * n_r * n_t);
    let mut theta = Vec::new();
    for (job, f) in jobs.iter().zip(&fits) {
        let (mode, eps) = (job.mode.name(), job.epsilon_field());
        for r in 0..n_r {
            for t in 0..n_t {
                assignments.push(vec![
                    mode.clone(),
                    eps.clone(),
                    input.events.regions[r].clone(),
                    input.events.timesteps[t].to_string(),
                    f.z_mode[r * n_t + t].to_string(),
                ]);
            }
        }
        for (s, per_state) in f.theta_estimate.iter().enumerate() {
            for (d, probs) in per_state.iter().enumerate() {
                for (v, p) in probs.iter().enumerate() {
                    theta.push(vec![
                        mode.clone(),
                        eps.clone(),
                        s.to_string(),
                        input.events.feature_names[d].clone(),
                        input.events.domains[d][v].clone(),
                        p.to_string(),
                    ]);
                }
            }
        }
    }
    Ok(HmmFitOutput {
        jobs,
        fits,
        summaries,
        assignments,
        theta,
    })
}

/// Held-out cells for split `split`: a uniform draw of
/// `round(test_fraction · cells)` cells, at least one.
pub fn split_cells(
    data: &HmmData,
    test_fraction: f64,
    seed: u64,
    split: usize,
) -> Result<Vec<(usize, usize)>> {
    let n = data.n_cells();
    if n < 2 {
        bail!("need at least two cells to hold any out");
    }
    let m = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut rng = stream_rng(derive_seed(seed, SPLIT_STREAMS), split as u64);
    let mut idx = sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    let t = data.n_timesteps();
    Ok(idx.into_iter().map(|c| (c / t, c % t)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub mode: String,
    pub epsilon: f64,
    pub mean_heldout_loglik: f64,
    pub stderr: f64,
    pub splits: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitLedgerSummary {
    pub entries: usize,
    pub total: PrivacyCost,
    pub converged: Option<PrivacyCost>,
}

pub struct HmmEvalOutput {
    pub rows: Vec<EvalRow>,
    /// Held-out log-likelihood per job and split.
    pub scores: BTreeMap<String, Vec<f64>>,
    pub ledgers: BTreeMap<String, Vec<SplitLedgerSummary>>,
    pub heldout_cells: Vec<Vec<(usize, usize)>>,
}

pub fn run_hmm_eval(cfg: &HmmExperimentConfig, data: &HmmData, seed: u64) -> Result<HmmEvalOutput> {
    let jobs = jobs(cfg);
    let splits: Vec<Vec<(usize, usize)>> = (0..cfg.splits)
        .map(|s| split_cells(data, cfg.test_fraction, seed, s))
        .collect::<Result<_>>()?;
    let prepared = splits
        .iter()
        .map(|cells| Ok((data.without_cells(cells)?, data.extract_cells(cells)?)))
        .collect::<Result<Vec<_>>>()?;

    let n = jobs.len() * cfg.splits;
    let results = map_streams(
        derive_seed(seed, EVAL_STREAMS),
        n,
        |i, rng| -> Result<(f64, SplitLedgerSummary)> {
            let (job, split) = (&jobs[i / cfg.splits], i % cfg.splits);
            let (train, test) = &prepared[split];
            let model = job.model(cfg, data.feature_dims())?;
            let f = fit(&model, train, job.fit_mode(), cfg.n_iters, cfg.burn_in, rng)?;
            let ll = heldout_loglik(&f, test, &model)?;
            Ok((
                ll,
                SplitLedgerSummary {
                    entries: f.ledger.entries().len(),
                    total: f.total_cost,
                    converged: f.converged_cost,
                },
            ))
        },
    );

    let mut scores = BTreeMap::new();
    let mut ledgers = BTreeMap::new();
    let mut rows = Vec::new();
    let mut it = results.into_iter();
    for job in &jobs {
        let mut lls = Vec::with_capacity(cfg.splits);
        let mut summaries = Vec::with_capacity(cfg.splits);
        for _ in 0..cfg.splits {
            let (ll, s) = it.next().expect("one result per job and split")?;
            lls.push(ll);
            summaries.push(s);
        }
        let (mean, se) = mean_stderr(&lls);
        let budgets = match job.epsilon {
            Some(e) => vec![e],
            None => cfg.epsilons.clone(),
        };
        for epsilon in budgets {
            rows.push(EvalRow {
                mode: job.mode.name(),
                epsilon,
                mean_heldout_loglik: mean,
                stderr: se,
                splits: cfg.splits,
            });
        }
        scores.insert(job.name(), lls);
        ledgers.insert(job.name(), summaries);
    }
    Ok(HmmEvalOutput {
        rows,
        scores,
        ledgers,
        heldout_cells: splits,
    })
}
