use rand::Rng;

use crate::error::{domain, Result};

/// Selection probabilities of the exponential mechanism over a finite
/// support: `p_k ∝ exp(u_k · ε / (2Δ))`, computed with max-subtraction.
pub fn exp_mech_probabilities(utilities: &[f64], delta_log: f64, epsilon: f64) -> Result<Vec<f64>> {
    if utilities.is_empty() {
        return Err(domain("exponential mechanism needs a nonempty support"));
    }
    if !(delta_log > 0.0) || !(epsilon > 0.0) {
        return Err(domain(format!(
            "need Δ > 0 and ε > 0, got Δ = {delta_log}, ε = {epsilon}"
        )));
    }
    if let Some(u) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(domain(format!("utilities must be finite, got {u}")));
    }
    let scale = epsilon / (2.0 * delta_log);
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = utilities
        .iter()
        .map(|u| ((u - max) * scale).exp())
        .collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Draw an index from a normalized probability vector.
pub fn categorical_draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the final partial sum
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// One exponential-mechanism Gibbs update over a finite support.
pub fn exp_mech_gibbs_draw<R: Rng + ?Sized>(
    utilities: &[f64],
    delta_log: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    let p = exp_mech_probabilities(utilities, delta_log, epsilon)?;
    Ok(categorical_draw(&p, rng))
}
