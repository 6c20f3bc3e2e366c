//! Estimation error of private and non-private posterior estimators as the
//! dataset grows.

use std::collections::BTreeMap;

use anyhow::Result;
use privbayes::expfam::{posterior_mean, sample_posterior, update_posterior};
use privbayes::mechanisms::{floor_shapes, ops_sample, ops_temperature, privatize_stats};
use privbayes::parallel::map_streams;
use privbayes::rng::derive_seed;
use privbayes::{
    BetaBernoulliModel, Composition, ConjugatePrior, Ledger, Model, PrivacyCost, SuffStats,
    TemperedSampleSpec,
};
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::config::AreConfig;
use crate::experiments::mean_stderr;

/// Estimators compared, in output order.
pub const METHODS: [&str; 5] = [
    "nonprivate",
    "nonprivate_truncated",
    "laplace_sample",
    "ops_sample",
    "laplace_mean",
];

/// Signed errors `p̂ − p` per method (indexed as [`METHODS`]) over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct AreErrors {
    pub n: u64,
    pub errors: [Vec<f64>; 5],
}

impl AreErrors {
    pub fn method(&self, name: &str) -> &[f64] {
        let i = METHODS
            .iter()
            .position(|m| *m == name)
            .expect("known method");
        &self.errors[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreRow {
    pub method: &'static str,
    pub n: u64,
    pub mean_l1: f64,
    pub stderr: f64,
}

/// Draw `repeats` Bernoulli datasets of size `n` and record every
/// estimator's error. Repeat `i` uses stream `i` of a seed derived from
/// `(seed, n)`, so results do not depend on the rest of the grid.
pub fn are_errors(cfg: &AreConfig, n: u64, seed: u64) -> Result<AreErrors> {
    let plain: Model = BetaBernoulliModel::untruncated().into();
    let trunc: Model = BetaBernoulliModel::new(cfg.a0)?.into();
    let prior = ConjugatePrior::from_shapes(&cfg.prior)?;
    let spec = ops_temperature(&trunc, cfg.epsilon)?;
    let binom = Binomial::new(n, cfg.p_true)?;
    let p = cfg.p_true;

    let runs = map_streams(
        derive_seed(seed, n),
        cfg.repeats,
        |_, rng| -> Result<[f64; 5]> {
            let s = binom.sample(rng);
            let stats = SuffStats::new(vec![s as f64, (n - s) as f64], n);
            let post = update_posterior(&prior, &stats)?;
            let nonprivate = sample_posterior(&plain, &post, rng)?[0];
            let nonprivate_trunc = sample_posterior(&trunc, &post, rng)?[0];
            let noised = privatize_stats(&plain, &stats, cfg.epsilon, rng)?;
            let (lpost, _) = floor_shapes(&update_posterior(&prior, &noised)?);
            let laplace = sample_posterior(&plain, &lpost, rng)?[0];
            let laplace_mean = posterior_mean(&plain, &lpost)?[0];
            let ops = ops_sample(&trunc, &post, &spec, rng)?[0];
            Ok([
                nonprivate - p,
                nonprivate_trunc - p,
                laplace - p,
                ops - p,
                laplace_mean - p,
            ])
        },
    );
    let mut errors: [Vec<f64>; 5] = Default::default();
    for run in runs {
        for (e, v) in errors.iter_mut().zip(run?) {
            e.push(v);
        }
    }
    Ok(AreErrors { n, errors })
}

pub struct AreResult {
    pub rows: Vec<AreRow>,
    pub ops: TemperedSampleSpec,
    pub ledgers: BTreeMap<String, Ledger>,
}

pub fn run_are(cfg: &AreConfig, seed: u64) -> Result<AreResult> {
    let per_n: Vec<AreErrors> = cfg
        .n_grid
        .iter()
        .map(|&n| are_errors(cfg, n, seed))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, method) in METHODS.iter().enumerate() {
        for e in &per_n {
            let l1: Vec<f64> = e.errors[i].iter().map(|v| v.abs()).collect();
            let (mean_l1, stderr) = mean_stderr(&l1);
            rows.push(AreRow {
                method,
                n: e.n,
                mean_l1,
                stderr,
            });
        }
    }

    let trunc: Model = BetaBernoulliModel::new(cfg.a0)?.into();
    let spec = ops_temperature(&trunc, cfg.epsilon)?;
    let mut ledgers = BTreeMap::new();
    for name in ["laplace_sample", "laplace_mean"] {
        let mut l = Ledger::new();
        l.charge(
            "privatize (successes, failures)",
            PrivacyCost::pure(cfg.epsilon)?,
            Composition::Sequential,
        );
        ledgers.insert(format!("{name} (per dataset)"), l);
    }
    let mut l = Ledger::new();
    l.charge(
        "one tempered posterior sample",
        PrivacyCost::pure(spec.epsilon_charged)?,
        Composition::Sequential,
    );
    ledgers.insert("ops_sample (per dataset)".to_owned(), l);
    Ok(AreResult {
        rows,
        ops: spec,
        ledgers,
    })
}
