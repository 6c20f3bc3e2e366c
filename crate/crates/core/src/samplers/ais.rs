//! Annealed importance sampling along a privacy-budget schedule.

use rand::Rng;

use crate::accountant::{compose_sequential, PrivacyCost};
use crate::error::{domain, Result};
use crate::samplers::laplace_draw;
use crate::special::ln_sum_exp;

/// Per-level budgets `ε_0 ≥ ε_1 ≥ … ≥ ε_n`, level 0 being the target and
/// level `n` the hottest. Level `j` targets `Pr(θ, X)^{β_j}` with
/// `β_j = min(1, ε_j / 2Δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealingSchedule {
    epsilons: Vec<f64>,
    delta_log: f64,
}

impl AnnealingSchedule {
    pub fn new(epsilons: Vec<f64>, delta_log: f64) -> Result<Self> {
        if epsilons.len() < 2 {
            return Err(domain("an annealing schedule needs at least two levels"));
        }
        if !(delta_log > 0.0 && delta_log.is_finite()) {
            return Err(domain(format!(
                "sensitivity must be positive and finite, got {delta_log}"
            )));
        }
        if let Some(e) = epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(domain(format!(
                "level budgets must be finite and nonnegative, got {e}"
            )));
        }
        if epsilons.windows(2).any(|w| w[1] > w[0]) {
            return Err(domain(
                "level budgets must be nonincreasing toward the hot end",
            ));
        }
        Ok(AnnealingSchedule {
            epsilons,
            delta_log,
        })
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn delta_log(&self) -> f64 {
        self.delta_log
    }

    /// Number of annealing steps `n` (levels minus one).
    pub fn steps(&self) -> usize {
        self.epsilons.len() - 1
    }

    pub fn beta(&self, level: usize) -> f64 {
        (self.epsilons[level] / (2.0 * self.delta_log)).min(1.0)
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..self.epsilons.len()).map(|j| self.beta(j)).collect()
    }
}

/// A sample with its log importance weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample<P> {
    pub theta: P,
    pub log_weight: f64,
}

/// How per-level costs compose across the model's variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AisComposition {
    /// Every one of `n_vars` Gibbs updates per level is charged: `Σ_j D ε_j`.
    Sequential { n_vars: usize },
    /// Each update touches a single record: `Σ_j ε_j`.
    Parallel,
}

/// Run AIS for `n_samples` independent chains.
///
/// Each chain starts with an exact draw from the hottest level `n`
/// (`init`), then moves down through levels `n − 1, …, 1` with `kernel(j, β_j,
/// θ)`, which must leave level `j`'s distribution invariant. With
/// `θ^{(j)}` the state after the move at level `j + 1`,
///
/// `log ω = Σ_{j<n} (β_j − β_{j+1}) log Pr(θ^{(j)}, X)`.
///
/// The returned cost charges every level that touched the data, for every
/// chain, composed sequentially.
pub fn ais_run<P, L, I, K, R>(
    schedule: &AnnealingSchedule,
    log_joint: L,
    init: I,
    kernel: K,
    n_samples: usize,
    composition: AisComposition,
    rng: &mut R,
) -> Result<(Vec<WeightedSample<P>>, PrivacyCost)>
where
    L: Fn(&P) -> f64,
    I: Fn(&mut R) -> Result<P>,
    K: Fn(usize, f64, &P, &mut R) -> Result<P>,
    R: Rng + ?Sized,
{
    let betas = schedule.betas();
    let n = schedule.steps();
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut theta = init(rng)?;
        let mut log_w = 0.0;
        for j in (0..n).rev() {
            if j + 1 < n {
                theta = kernel(j + 1, betas[j + 1], &theta, rng)?;
            }
            let gap = betas[j] - betas[j + 1];
            if gap != 0.0 {
                log_w += gap * log_joint(&theta);
            }
        }
        if !log_w.is_finite() {
            return Err(domain(format!("non-finite log weight {log_w}")));
        }
        out.push(WeightedSample {
            theta,
            log_weight: log_w,
        });
    }

    let per_chain: f64 = schedule.epsilons()[1..].iter().sum();
    let per_chain = match composition {
        AisComposition::Sequential { n_vars } => per_chain * n_vars as f64,
        AisComposition::Parallel => per_chain,
    };
    let cost = compose_sequential(&vec![PrivacyCost::pure(per_chain)?; n_samples]);
    Ok((out, cost))
}

/// Normalized importance weights released through the Laplace mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivatizedWeights {
    pub weights: Vec<f64>,
    /// Every noised component clamped to zero; the uniform point was returned.
    pub fell_back_to_uniform: bool,
}

/// Normalize, add `Laplace(2/ε)` noise per component, clamp at zero and
/// renormalize. The normalized weight vector has L1 sensitivity at most 2.
pub fn privatize_weights<R: Rng + ?Sized>(
    log_weights: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<PrivatizedWeights> {
    if log_weights.is_empty() {
        return Err(domain("no weights to privatize"));
    }
    if let Some(w) = log_weights.iter().find(|w| !w.is_finite()) {
        return Err(domain(format!("log weights must be finite, got {w}")));
    }
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let z = ln_sum_exp(log_weights);
    let scale = 2.0 / epsilon;
    let mut noised = Vec::with_capacity(log_weights.len());
    for lw in log_weights {
        noised.push(((lw - z).exp() + laplace_draw(scale, rng)?).max(0.0));
    }
    let total: f64 = noised.iter().sum();
    if total <= 0.0 {
        let k = log_weights.len() as f64;
        return Ok(PrivatizedWeights {
            weights: vec![1.0 / k; log_weights.len()],
            fell_back_to_uniform: true,
        });
    }
    Ok(PrivatizedWeights {
        weights: noised.into_iter().map(|w| w / total).collect(),
        fell_back_to_uniform: false,
    })
}
