use rand::Rng;

use crate::error::{domain, Result};

/// Outcome of one private Metropolis step.
#[derive(Debug, Clone, PartialEq)]
pub struct MetropolisStep<P> {
    pub theta: P,
    pub accepted: bool,
    /// Monte Carlo estimate of `Pr(reject; X, θ, T)`. This is an estimate,
    /// not a certified bound.
    pub delta_estimate: f64,
}

fn accept_probability(log_ratio: f64, temperature: f64) -> f64 {
    if log_ratio.is_nan() || log_ratio == f64::NEG_INFINITY {
        return 0.0;
    }
    if temperature.is_infinite() {
        return 1.0;
    }
    (log_ratio / temperature).exp().min(1.0)
}

/// Metropolis update at temperature `T = 2Δ/ε` with a symmetric proposal.
///
/// After the step, `probes` fresh proposals from the current point estimate
/// the rejection probability, which is the `δ` the caller should charge
/// alongside `ε`.
pub fn metropolis_update<P, L, Q, R>(
    log_joint: L,
    delta_log: f64,
    epsilon: f64,
    proposal: Q,
    theta: &P,
    rng: &mut R,
    probes: usize,
) -> Result<MetropolisStep<P>>
where
    P: Clone,
    L: Fn(&P) -> f64,
    Q: Fn(&P, &mut R) -> P,
    R: Rng + ?Sized,
{
    if probes == 0 {
        return Err(domain("probe count must be at least 1"));
    }
    if !(delta_log > 0.0) || !(epsilon > 0.0) {
        return Err(domain(format!(
            "need Δ > 0 and ε > 0, got Δ = {delta_log}, ε = {epsilon}"
        )));
    }
    let temperature = 2.0 * delta_log / epsilon;
    let current = log_joint(theta);
    if !current.is_finite() {
        return Err(domain(format!(
            "log joint at the current point is {current}"
        )));
    }

    let candidate = proposal(theta, rng);
    let a = accept_probability(log_joint(&candidate) - current, temperature);
    let u: f64 = rng.random();
    let accepted = u < a;

    let mut reject_mass = 0.0;
    for _ in 0..probes {
        let probe = proposal(theta, rng);
        reject_mass += 1.0 - accept_probability(log_joint(&probe) - current, temperature);
    }

    Ok(MetropolisStep {
        theta: if accepted { candidate } else { theta.clone() },
        accepted,
        delta_estimate: reject_mass / probes as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, PrivRng};

    #[test]
    fn uphill_always_accepted() {
        let mut rng = stream_rng(0, 0);
        for _ in 0..1000 {
            let s = metropolis_update(
                |x: &f64| *x,
                1.0,
                0.5,
                |x: &f64, _: &mut PrivRng| x + 1.0,
                &0.0,
                &mut rng,
                1,
            )
            .unwrap();
            assert!(s.accepted);
            assert_eq!(s.delta_estimate, 0.0);
        }
    }

    #[test]
    fn flat_limit_accepts_everything() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            let s = metropolis_update(
                |x: &f64| -x * 50.0,
                1.0,
                1e-300,
                |x: &f64, _: &mut PrivRng| x + 1.0,
                &0.0,
                &mut rng,
                4,
            )
            .unwrap();
            assert!(s.accepted);
            assert!(s.delta_estimate < 1e-12);
        }
    }

    #[test]
    fn nonfinite_current_point() {
        let mut rng = stream_rng(2, 0);
        let r = metropolis_update(
            |_: &f64| f64::NEG_INFINITY,
            1.0,
            1.0,
            |x: &f64, _: &mut PrivRng| *x,
            &0.0,
            &mut rng,
            1,
        );
        assert!(r.is_err());
        let r = metropolis_update(
            |_: &f64| 0.0,
            1.0,
            1.0,
            |x: &f64, _: &mut PrivRng| *x,
            &0.0,
            &mut rng,
            0,
        );
        assert!(r.is_err());
    }
}
