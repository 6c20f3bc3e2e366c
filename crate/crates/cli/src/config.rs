//! Experiment configuration. Every field has a default, so an empty JSON
//! object (or no config file at all) is a valid configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::events::PreprocessRules;
use crate::synth::SynthConfig;

/// Top-level configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every random stream is derived from it.
    pub seed: u64,
    /// Root output directory; each experiment writes to a subdirectory.
    pub out_dir: PathBuf,
    /// Worker threads (0 = one per core).
    pub threads: usize,
    pub beta_demo: BetaDemoConfig,
    pub are: AreConfig,
    pub adversarial: AdversarialConfig,
    pub hmm: HmmExperimentConfig,
    pub synth: SynthConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 20160101,
            out_dir: PathBuf::from("out"),
            threads: 0,
            beta_demo: BetaDemoConfig::default(),
            are: AreConfig::default(),
            adversarial: AdversarialConfig::default(),
            hmm: HmmExperimentConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.beta_demo.validate()?;
        self.are.validate()?;
        self.adversarial.validate()?;
        self.hmm.validate()?;
        self.synth.validate()?;
        Ok(())
    }
}

/// Fig. 1 style demo: posterior densities for a small Bernoulli dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaDemoConfig {
    pub epsilon: f64,
    pub p_true: f64,
    pub a0: f64,
    pub n: u64,
    /// Laplace realizations to render.
    pub laplace_draws: usize,
    pub grid_points: usize,
    /// Beta prior shapes `(a, b)`.
    pub prior: [f64; 2],
}

impl Default for BetaDemoConfig {
    fn default() -> Self {
        BetaDemoConfig {
            epsilon: 1.0,
            p_true: 0.3,
            a0: 0.2,
            n: 20,
            laplace_draws: 30,
            grid_points: 1000,
            prior: [1.0, 1.0],
        }
    }
}

impl BetaDemoConfig {
    fn validate(&self) -> Result<()> {
        check_positive("beta_demo.epsilon", self.epsilon)?;
        check_prob("beta_demo.p_true", self.p_true)?;
        check_trunc("beta_demo.a0", self.a0)?;
        if self.grid_points < 2 {
            bail!("beta_demo.grid_points must be at least 2");
        }
        check_prior("beta_demo.prior", &self.prior)
    }
}

/// Fig. 3 style efficiency comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreConfig {
    pub epsilon: f64,
    pub p_true: f64,
    /// OPS truncation.
    pub a0: f64,
    pub n_grid: Vec<u64>,
    pub repeats: usize,
    pub prior: [f64; 2],
}

impl Default for AreConfig {
    fn default() -> Self {
        AreConfig {
            epsilon: 0.1,
            p_true: 0.1,
            a0: 0.05,
            n_grid: default_n_grid(),
            repeats: 1000,
            prior: [1.0, 1.0],
        }
    }
}

/// 16 log-spaced sizes from 10 to 10⁴, rounded.
pub fn default_n_grid() -> Vec<u64> {
    (0..16)
        .map(|i| 10f64.powf(1.0 + 3.0 * i as f64 / 15.0).round() as u64)
        .collect()
}

impl AreConfig {
    fn validate(&self) -> Result<()> {
        check_positive("are.epsilon", self.epsilon)?;
        check_prob("are.p_true", self.p_true)?;
        check_trunc("are.a0", self.a0)?;
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            bail!("are.n_grid must be nonempty with positive sizes");
        }
        if self.repeats < 2 {
            bail!("are.repeats must be at least 2");
        }
        check_prior("are.prior", &self.prior)
    }
}

/// Greedy adversarial dataset construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversarialConfig {
    pub a0: f64,
    pub steps: usize,
    pub grid_points: usize,
    pub prior: [f64; 2],
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        AdversarialConfig {
            a0: 0.1,
            steps: 500,
            grid_points: 2000,
            prior: [1.0, 1.0],
        }
    }
}

impl AdversarialConfig {
    fn validate(&self) -> Result<()> {
        check_trunc("adversarial.a0", self.a0)?;
        if self.grid_points < 2 {
            bail!("adversarial.grid_points must be at least 2");
        }
        check_prior("adversarial.prior", &self.prior)
    }
}

/// Inference mode of an HMM run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HmmModeSpec {
    Nonprivate,
    Laplace,
    /// OPS with truncation `a0 = 1/(multiplier · K_d)`.
    Ops {
        multiplier: f64,
    },
}

impl HmmModeSpec {
    pub fn name(&self) -> String {
        match self {
            HmmModeSpec::Nonprivate => "nonprivate".into(),
            HmmModeSpec::Laplace => "laplace".into(),
            HmmModeSpec::Ops { multiplier } => format!("ops_m{multiplier}"),
        }
    }
}

/// HMM case study: data source, model and evaluation protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmExperimentConfig {
    /// Event CSV; when absent, data are generated from the `synth` section.
    pub input: Option<PathBuf>,
    /// Declared outcome labels per feature column, in index order.
    pub feature_domains: Option<Vec<Vec<String>>>,
    pub preprocess: PreprocessRules,
    pub n_states: usize,
    pub alpha: f64,
    pub beta: f64,
    pub modes: Vec<HmmModeSpec>,
    /// Total budgets (summed over features).
    pub epsilons: Vec<f64>,
    pub n_iters: usize,
    pub burn_in: usize,
    pub splits: usize,
    pub test_fraction: f64,
}

impl Default for HmmExperimentConfig {
    fn default() -> Self {
        HmmExperimentConfig {
            input: None,
            feature_domains: None,
            preprocess: PreprocessRules::default(),
            n_states: 2,
            alpha: 1.0,
            beta: 1.0,
            modes: vec![
                HmmModeSpec::Nonprivate,
                HmmModeSpec::Laplace,
                HmmModeSpec::Ops { multiplier: 10.0 },
                HmmModeSpec::Ops { multiplier: 100.0 },
            ],
            epsilons: vec![1.0, 2.0, 5.0, 10.0, 20.0],
            n_iters: 200,
            burn_in: 100,
            splits: 5,
            test_fraction: 0.1,
        }
    }
}

impl HmmExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            bail!("hmm.n_states must be at least 1");
        }
        check_positive("hmm.alpha", self.alpha)?;
        check_positive("hmm.beta", self.beta)?;
        if self.modes.is_empty() {
            bail!("hmm.modes must be nonempty");
        }
        for m in &self.modes {
            if let HmmModeSpec::Ops { multiplier } = m {
                if !(*multiplier > 1.0) {
                    bail!("hmm ops multiplier must exceed 1, got {multiplier}");
                }
            }
        }
        if self.epsilons.is_empty() {
            bail!("hmm.epsilons must be nonempty");
        }
        for &e in &self.epsilons {
            check_positive("hmm.epsilons", e)?;
        }
        if self.n_iters <= self.burn_in {
            bail!("hmm.n_iters must exceed hmm.burn_in");
        }
        if self.splits == 0 {
            bail!("hmm.splits must be at least 1");
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            bail!("hmm.test_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be positive and finite, got {v}");
    }
    Ok(())
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        bail!("{name} must lie in [0, 1], got {v}");
    }
    Ok(())
}

fn check_trunc(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 0.5) {
        bail!("{name} must lie in (0, 0.5), got {v}");
    }
    Ok(())
}

fn check_prior(name: &str, prior: &[f64; 2]) -> Result<()> {
    if !prior.iter().all(|&s| s >= 1.0 && s.is_finite()) {
        bail!("{name} shapes must be finite and at least 1, got {prior:?}");
    }
    Ok(())
}
