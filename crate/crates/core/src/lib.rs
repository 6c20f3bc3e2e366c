//! Differentially private Bayesian inference for conjugate exponential
//! families and a discrete-emission hidden Markov model.
//!
//! Two privatization routes are provided. The Laplace route perturbs
//! aggregate sufficient statistics once and runs ordinary conjugate inference
//! on the result. The one-posterior-sample (OPS) route releases draws from a
//! tempered posterior on a truncated support, which is an instance of the
//! exponential mechanism.

pub mod accountant;
pub mod error;
pub mod expfam;
pub mod hmm;
pub mod mechanisms;
pub mod parallel;
pub mod quadrature;
pub mod rng;
pub mod samplers;
pub mod special;

pub use accountant::{Composition, Ledger, PrivacyCost};
pub use error::{Error, Result};
pub use expfam::{
    BetaBernoulliModel, CategoricalDirichletModel, ConjugatePrior, Model, PosteriorParams,
    SuffStats,
};
pub use mechanisms::{Sensitive, Sensitivity, TemperedSampleSpec};
pub use rng::PrivRng;
