//! Hidden Markov model over `(region, timestep)` cells with naive-Bayes
//! categorical emissions, transition probabilities collapsed out, and Gibbs
//! inference in non-private, Laplace and OPS modes.

mod data;
mod heldout;
mod sampler;
mod state;

pub use data::{HeldoutCell, HmmConfig, HmmData};
pub use heldout::{cell_predictive, heldout_loglik, transition_weights};
pub use sampler::{
    fit, fit_from, posterior_mean_theta, privatize_hmm_counts, state_counts, theta_update, z_sweep,
    FitMode, FitResult, HmmSample, ThetaMode,
};
pub use state::{emission_loglik, transition_counts, z_conditional, HmmState};
