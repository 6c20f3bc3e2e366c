//! Greedy construction of a dataset with high dataset-specific privacy cost
//! for the truncated beta–Bernoulli OPS posterior.

use anyhow::Result;
use privbayes::expfam::{update_posterior, PosteriorDensity};
use privbayes::{BetaBernoulliModel, ConjugatePrior, Model, Sensitive, SuffStats};
use serde::Serialize;

use crate::config::AdversarialConfig;

/// One greedy step. Step 0 is the empty dataset with no choice made.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialRow {
    pub step: usize,
    pub successes: u64,
    pub failures: u64,
    pub local_epsilon: f64,
    /// `Some(true)` for an appended success.
    pub chosen: Option<bool>,
    pub bound: f64,
}

struct Grid {
    model: Model,
    prior: ConjugatePrior,
    points: Vec<f64>,
}

impl Grid {
    fn new(cfg: &AdversarialConfig) -> Result<Self> {
        let model: Model = BetaBernoulliModel::new(cfg.a0)?.into();
        let m = cfg.grid_points;
        let (lo, hi) = (cfg.a0, 1.0 - cfg.a0);
        let points = (0..m)
            .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
            .collect();
        Ok(Grid {
            model,
            prior: ConjugatePrior::from_shapes(&cfg.prior)?,
            points,
        })
    }

    fn log_density(&self, successes: u64, failures: u64) -> Result<Vec<f64>> {
        let stats = SuffStats::new(
            vec![successes as f64, failures as f64],
            successes + failures,
        );
        let d = PosteriorDensity::new(&self.model, &update_posterior(&self.prior, &stats)?)?;
        Ok(self
            .points
            .iter()
            .map(|&p| d.log_pdf(&BetaBernoulliModel::point(p)))
            .collect())
    }

    /// Largest log-density gap over the grid between the two ways of adding
    /// one more record to `(successes, failures)`.
    fn local_epsilon(&self, successes: u64, failures: u64) -> Result<f64> {
        let a = self.log_density(successes + 1, failures)?;
        let b = self.log_density(successes, failures + 1)?;
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Local ε of the dataset reached after `(successes, failures)` records.
pub fn local_epsilon(cfg: &AdversarialConfig, successes: u64, failures: u64) -> Result<f64> {
    Grid::new(cfg)?.local_epsilon(successes, failures)
}

pub fn run_adversarial(cfg: &AdversarialConfig) -> Result<Vec<AdversarialRow>> {
    let grid = Grid::new(cfg)?;
    let bound = 2.0
        * grid
            .model
            .exp_mech_sensitivity()
            .finite()
            .expect("truncated model");
    let (mut s, mut f) = (0u64, 0u64);
    let mut rows = vec![AdversarialRow {
        step: 0,
        successes: 0,
        failures: 0,
        local_epsilon: grid.local_epsilon(0, 0)?,
        chosen: None,
        bound,
    }];
    for step in 1..=cfg.steps {
        let with_success = grid.local_epsilon(s + 1, f)?;
        let with_failure = grid.local_epsilon(s, f + 1)?;
        let success = with_success >= with_failure;
        if success {
            s += 1;
        } else {
            f += 1;
        }
        let local_epsilon = if success { with_success } else { with_failure };
        rows.push(AdversarialRow {
            step,
            successes: s,
            failures: f,
            local_epsilon,
            chosen: Some(success),
            bound,
        });
    }
    Ok(rows)
}
