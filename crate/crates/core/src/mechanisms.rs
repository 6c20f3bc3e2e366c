//! Privatization mechanisms: Laplace noise on aggregate sufficient
//! statistics, and one-posterior-sample (OPS) tempered sampling via the
//! exponential mechanism.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::expfam::{
    sample_posterior, update_posterior, ConjugatePrior, Model, PosteriorParams, SuffStats,
};
use crate::samplers::laplace_draw;

/// Smallest shape parameter allowed at the sampling boundary.
pub const SHAPE_FLOOR: f64 = 1e-6;

/// A sensitivity bound, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sensitivity {
    Finite(f64),
    Infinite,
}

impl Sensitivity {
    pub fn finite(self) -> Option<f64> {
        match self {
            Sensitivity::Finite(v) => Some(v),
            Sensitivity::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Sensitivity::Infinite)
    }
}

impl fmt::Display for Sensitivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sensitivity::Finite(v) => write!(f, "{v}"),
            Sensitivity::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Sensitivity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sensitivity::Finite(v) => s.serialize_f64(*v),
            Sensitivity::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Both sensitivities of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    /// Worst-case L1 change of the aggregate statistics.
    pub l1: Sensitivity,
    /// Worst-case change of `log Pr(θ, X)`.
    pub exp_mech: Sensitivity,
}

/// Models whose sensitivities the mechanisms can query.
pub trait Sensitive {
    /// `sup ‖S(x′) − S(x)‖₁` over pairs of records.
    fn l1_stat_sensitivity(&self) -> Sensitivity;
    /// `sup |θᵀ(S(x′) − S(x)) + log h(x′) − log h(x)|` over records and the
    /// parameter support.
    fn exp_mech_sensitivity(&self) -> Sensitivity;

    fn sensitivity_report(&self) -> SensitivityReport {
        SensitivityReport {
            l1: self.l1_stat_sensitivity(),
            exp_mech: self.exp_mech_sensitivity(),
        }
    }
}

impl Sensitive for Model {
    fn l1_stat_sensitivity(&self) -> Sensitivity {
        // swapping one indicator for another moves two coordinates by one
        Sensitivity::Finite(2.0)
    }

    fn exp_mech_sensitivity(&self) -> Sensitivity {
        let a0 = self.trunc();
        if a0 <= 0.0 {
            return Sensitivity::Infinite;
        }
        // log of the largest over the smallest attainable coordinate
        let top = match self {
            Model::BetaBernoulli(_) => 1.0 - a0,
            Model::Categorical(m) => 1.0 - (m.dim() as f64 - 1.0) * a0,
        };
        Sensitivity::Finite((top / a0).ln())
    }
}

pub fn l1_stat_sensitivity<M: Sensitive + ?Sized>(model: &M) -> Sensitivity {
    model.l1_stat_sensitivity()
}

pub fn exp_mech_sensitivity<M: Sensitive + ?Sized>(model: &M) -> Sensitivity {
    model.exp_mech_sensitivity()
}

/// Laplace scale `b = Δ/ε`.
pub fn laplace_scale(sensitivity: Sensitivity, epsilon: f64) -> Result<f64> {
    let delta = sensitivity
        .finite()
        .ok_or_else(|| Error::UnboundedSensitivity("L1 sensitivity is infinite".into()))?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("sensitivity must be positive, got {delta}")));
    }
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(delta / epsilon)
}

/// Laplace mechanism on aggregate statistics, followed by projection onto
/// the nonnegative orthant. The count is passed through untouched.
pub fn privatize_stats<M, R>(
    model: &M,
    stats: &SuffStats,
    epsilon: f64,
    rng: &mut R,
) -> Result<SuffStats>
where
    M: Sensitive + ?Sized,
    R: Rng + ?Sized,
{
    let scale = laplace_scale(model.l1_stat_sensitivity(), epsilon)?;
    let mut noised = Vec::with_capacity(stats.stats.len());
    for s in &stats.stats {
        noised.push((s + laplace_draw(scale, rng)?).max(0.0));
    }
    Ok(SuffStats {
        stats: noised,
        count: stats.count,
        privatized: true,
    })
}

/// Raise every shape parameter to at least [`SHAPE_FLOOR`]. Returns the
/// adjusted posterior and whether any component was clamped.
pub fn floor_shapes(post: &PosteriorParams) -> (PosteriorParams, bool) {
    let min_exp = SHAPE_FLOOR - 1.0;
    let mut fired = false;
    let eta_stats = post
        .eta_stats
        .iter()
        .map(|&e| {
            if e < min_exp || e.is_nan() {
                fired = true;
                min_exp
            } else {
                e
            }
        })
        .collect();
    (
        PosteriorParams {
            eta_stats,
            eta_count: post.eta_count,
        },
        fired,
    )
}

/// A draw from the posterior built on privatized statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateDraw {
    pub theta: Vec<f64>,
    /// The shape floor was applied before sampling.
    pub clamped: bool,
}

/// Sample from the posterior under `prior` given already-privatized
/// statistics, clamping shape parameters at the floor if needed.
pub fn sample_privatized_posterior<R: Rng + ?Sized>(
    model: &Model,
    prior: &ConjugatePrior,
    noised: &SuffStats,
    rng: &mut R,
) -> Result<PrivateDraw> {
    let post = update_posterior(prior, noised)?;
    let (post, clamped) = floor_shapes(&post);
    Ok(PrivateDraw {
        theta: sample_posterior(model, &post, rng)?,
        clamped,
    })
}

/// Temperature and budget split for one OPS release.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperedSampleSpec {
    pub temperature: f64,
    pub epsilon_charged: f64,
    pub epsilon_unused: f64,
}

/// `T = max(1, 2Δ/ε)`; budget beyond `2Δ` is reported as unused.
pub fn ops_temperature<M: Sensitive + ?Sized>(
    model: &M,
    epsilon: f64,
) -> Result<TemperedSampleSpec> {
    let delta = model.exp_mech_sensitivity().finite().ok_or_else(|| {
        Error::UnboundedSensitivity("exponential-mechanism sensitivity is infinite".into())
    })?;
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let cap = 2.0 * delta;
    let charged = epsilon.min(cap);
    Ok(TemperedSampleSpec {
        temperature: (cap / epsilon).max(1.0),
        epsilon_charged: charged,
        epsilon_unused: epsilon - charged,
    })
}

/// One draw from the posterior with all natural-parameter exponents divided
/// by the spec's temperature, on the model's (truncated) support.
pub fn ops_sample<R: Rng + ?Sized>(
    model: &Model,
    post: &PosteriorParams,
    spec: &TemperedSampleSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(spec.temperature >= 1.0) {
        return Err(domain(format!(
            "temperature must be at least 1, got {}",
            spec.temperature
        )));
    }
    if !model.is_truncated() && spec.temperature != 1.0 {
        return Err(domain("tempered OPS sampling requires a truncated model"));
    }
    sample_posterior(model, &post.tempered(spec.temperature), rng)
}
