use crate::error::{domain, Result};
use crate::hmm::data::{HeldoutCell, HmmConfig};
use crate::hmm::sampler::{FitResult, HmmSample};
use crate::hmm::state::{emission_loglik, ln_transition_factor, normalize_ln, row_of};
use crate::special::ln_sum_exp;

/// Normalized collapsed transition weights `w_k` for cell `(r, t)` in one
/// sample, excluding that cell's own transitions.
pub fn transition_weights(
    sample: &HmmSample,
    n_timesteps: usize,
    r: usize,
    t: usize,
    alpha: f64,
) -> Vec<f64> {
    let z_at = |tt: usize| sample.z[r * n_timesteps + tt];
    let prev = (t > 0).then(|| z_at(t - 1));
    let next = (t + 1 < n_timesteps).then(|| z_at(t + 1));
    let own = z_at(t);
    let mut counts = sample.trans_counts.clone();
    counts[row_of(prev)][own] -= 1;
    if let Some(n) = next {
        counts[own + 1][n] -= 1;
    }
    let lp: Vec<f64> = (0..sample.theta.len())
        .map(|k| ln_transition_factor(&counts, prev, next, k, alpha))
        .collect();
    normalize_ln(&lp)
}

/// Log predictive likelihood of one held-out cell under one sample:
/// `log Σ_k w_k Pr(X | k, θ)`.
pub fn cell_predictive(
    sample: &HmmSample,
    n_timesteps: usize,
    cell: &HeldoutCell,
    alpha: f64,
) -> f64 {
    let w = transition_weights(sample, n_timesteps, cell.region, cell.timestep, alpha);
    let terms: Vec<f64> = w
        .iter()
        .zip(&sample.theta)
        .map(|(wk, theta_k)| wk.ln() + emission_loglik(&cell.counts, theta_k))
        .collect();
    ln_sum_exp(&terms)
}

/// Summed log predictive likelihood of the held-out cells, averaging in
/// probability space over the fit's evaluation samples.
pub fn heldout_loglik(fit: &FitResult, heldout: &[HeldoutCell], config: &HmmConfig) -> Result<f64> {
    let samples = fit.eval_samples();
    let width: usize = config.feature_dims.iter().sum();
    let mut total = 0.0;
    for cell in heldout {
        if cell.region >= fit.n_regions || cell.timestep >= fit.n_timesteps {
            return Err(domain(format!(
                "held-out cell ({}, {}) outside the grid",
                cell.region, cell.timestep
            )));
        }
        if cell.counts.len() != width {
            return Err(domain(format!(
                "held-out cell has {} counts, expected {width}",
                cell.counts.len()
            )));
        }
        let per: Vec<f64> = samples
            .iter()
            .map(|s| cell_predictive(s, fit.n_timesteps, cell, config.alpha))
            .collect();
        total += ln_sum_exp(&per) - (per.len() as f64).ln();
    }
    Ok(total)
}
