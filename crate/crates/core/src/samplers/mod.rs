//! Randomness primitives and private MCMC kernels.

mod ais;
mod gibbs;
mod metropolis;
mod truncated;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{domain, Result};

pub use ais::{
    ais_run, privatize_weights, AisComposition, AnnealingSchedule, PrivatizedWeights,
    WeightedSample,
};
pub use gibbs::{categorical_draw, exp_mech_gibbs_draw, exp_mech_probabilities};
pub use metropolis::{metropolis_update, MetropolisStep};
pub use truncated::{
    dirichlet_draw, truncated_beta_draw, truncated_beta_quantile, truncated_dirichlet_draw,
    ROOT_MAX_ITER, ROOT_TOL,
};

/// Inverse CDF of the zero-centred Laplace distribution at `u ∈ (0, 1)`.
pub fn laplace_inverse_cdf(u: f64, scale: f64) -> f64 {
    if u < 0.5 {
        scale * (2.0 * u).ln()
    } else {
        -scale * (2.0 * (1.0 - u)).ln()
    }
}

/// One draw from `Laplace(0, scale)`.
pub fn laplace_draw<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!(
            "Laplace scale must be positive and finite, got {scale}"
        )));
    }
    let u: f64 = rng.sample(Open01);
    Ok(laplace_inverse_cdf(u, scale))
}
