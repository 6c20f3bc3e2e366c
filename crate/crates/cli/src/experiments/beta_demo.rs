//! Posterior densities for a small truncated beta–Bernoulli dataset: the
//! exact posterior, the OPS tempered posterior, and posteriors built from
//! several independent Laplace privatizations.

use std::collections::BTreeMap;

use anyhow::Result;
use privbayes::expfam::{aggregate_stats, update_posterior, PosteriorDensity};
use privbayes::mechanisms::{floor_shapes, ops_temperature, privatize_stats, SensitivityReport};
use privbayes::rng::stream_rng;
use privbayes::{
    BetaBernoulliModel, Composition, ConjugatePrior, Ledger, Model, PrivacyCost, Sensitive,
    SuffStats, TemperedSampleSpec,
};
use rand::Rng;
use serde::Serialize;

use crate::config::BetaDemoConfig;

#[derive(Debug, Clone)]
pub struct BetaDemoResult {
    /// Evaluation points spanning the truncated support.
    pub grid: Vec<f64>,
    pub true_density: Vec<f64>,
    pub ops_density: Vec<f64>,
    pub laplace_densities: Vec<Vec<f64>>,
    pub summary: BetaDemoSummary,
    pub ledgers: BTreeMap<String, Ledger>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaDemoSummary {
    pub n: u64,
    pub successes: u64,
    pub sensitivity: SensitivityReport,
    pub ops: TemperedSampleSpec,
    /// Noised (success, failure) statistics per Laplace realization.
    pub laplace_stats: Vec<[f64; 2]>,
    pub laplace_clamped: Vec<bool>,
}

fn density_on(model: &Model, post: &privbayes::PosteriorParams, grid: &[f64]) -> Result<Vec<f64>> {
    let d = PosteriorDensity::new(model, post)?;
    Ok(grid
        .iter()
        .map(|&p| d.log_pdf(&[p, 1.0 - p]).exp())
        .collect())
}

pub fn run_beta_demo(cfg: &BetaDemoConfig, seed: u64) -> Result<BetaDemoResult> {
    let model: Model = BetaBernoulliModel::new(cfg.a0)?.into();
    let prior = ConjugatePrior::from_shapes(&cfg.prior)?;
    let mut rng = stream_rng(seed, 0);
    let data: Vec<u32> = (0..cfg.n)
        .map(|_| u32::from(rng.random::<f64>() < cfg.p_true))
        .collect();
    let stats = aggregate_stats(&model, &data)?;
    let post = update_posterior(&prior, &stats)?;

    let (lo, hi) = (cfg.a0, 1.0 - cfg.a0);
    let m = cfg.grid_points;
    let grid: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        .collect();

    let spec = ops_temperature(&model, cfg.epsilon)?;
    let true_density = density_on(&model, &post, &grid)?;
    let ops_density = density_on(&model, &post.tempered(spec.temperature), &grid)?;

    let mut laplace_densities = Vec::with_capacity(cfg.laplace_draws);
    let mut laplace_stats = Vec::with_capacity(cfg.laplace_draws);
    let mut laplace_clamped = Vec::with_capacity(cfg.laplace_draws);
    for i in 0..cfg.laplace_draws {
        let mut rng = stream_rng(seed, 1 + i as u64);
        let noised: SuffStats = privatize_stats(&model, &stats, cfg.epsilon, &mut rng)?;
        let (p, clamped) = floor_shapes(&update_posterior(&prior, &noised)?);
        laplace_densities.push(density_on(&model, &p, &grid)?);
        laplace_stats.push([noised.stats[0], noised.stats[1]]);
        laplace_clamped.push(clamped);
    }

    let mut ledgers = BTreeMap::new();
    let mut laplace = Ledger::new();
    laplace.charge(
        "privatize (successes, failures)",
        PrivacyCost::pure(cfg.epsilon)?,
        Composition::Sequential,
    );
    ledgers.insert("laplace_realization".to_owned(), laplace);
    let mut ops = Ledger::new();
    let label = "one tempered posterior sample";
    let cost = PrivacyCost::pure(spec.epsilon_charged)?;
    if spec.epsilon_unused > 0.0 {
        ops.charge_noted(
            label,
            cost,
            Composition::Sequential,
            format!(
                "{} of the budget unused (T capped at 1)",
                spec.epsilon_unused
            ),
        );
    } else {
        ops.charge(label, cost, Composition::Sequential);
    }
    ledgers.insert("ops_sample".to_owned(), ops);

    Ok(BetaDemoResult {
        grid,
        true_density,
        ops_density,
        laplace_densities,
        summary: BetaDemoSummary {
            n: cfg.n,
            successes: stats.stats[0] as u64,
            sensitivity: model.sensitivity_report(),
            ops: spec,
            laplace_stats,
            laplace_clamped,
        },
        ledgers,
    })
}
