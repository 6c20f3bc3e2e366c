use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::accountant::{Composition, Ledger, PrivacyCost};
use crate::error::{contract, domain, Result};
use crate::expfam::{CategoricalDirichletModel, Model, PosteriorParams, SuffStats};
use crate::hmm::data::{HmmConfig, HmmData};
use crate::hmm::state::{flat_log_theta, ln_z_conditional_excluded, normalize_ln, HmmState};
use crate::mechanisms::{floor_shapes, ops_sample, ops_temperature, privatize_stats};
use crate::samplers::{categorical_draw, dirichlet_draw};

/// How emission parameters are resampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaMode {
    /// Exact conjugate Dirichlet draws.
    Exact,
    /// Tempered truncated draws, each an exponential-mechanism release at
    /// the given budget.
    Ops { epsilon_per_update: f64 },
}

/// Inference mode for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FitMode {
    Nonprivate,
    /// Counts privatized once up front at total budget `epsilon`.
    Laplace {
        epsilon: f64,
    },
    /// Emission updates tempered at per-feature budget `epsilon / D`.
    Ops {
        epsilon: f64,
    },
}

/// Per-state, per-feature aggregate counts over cells assigned to each state.
pub fn state_counts(state: &HmmState, data: &HmmData) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; data.cell_width()]; state.n_states()];
    for r in 0..data.n_regions() {
        for t in 0..data.n_timesteps() {
            if !data.is_observed(r, t) {
                continue;
            }
            let acc = &mut out[state.z_at(r, t)];
            for (a, c) in acc.iter_mut().zip(data.cell_counts(r, t)) {
                *a += c;
            }
        }
    }
    out
}

/// Resample every `θ^{(k,d)}` given the current assignments. OPS charges go
/// to `ledger`, one parallel group per feature (states see disjoint cells)
/// named after `label`. Returns whether the shape floor fired.
pub fn theta_update<R: Rng + ?Sized>(
    state: &mut HmmState,
    data: &HmmData,
    config: &HmmConfig,
    mode: ThetaMode,
    ledger: &mut Ledger,
    label: &str,
    rng: &mut R,
) -> Result<bool> {
    let counts = state_counts(state, data);
    let mut clamped = false;
    for d in 0..config.n_features() {
        let range = data.feature_range(d);
        let spec_model = match mode {
            ThetaMode::Exact => None,
            ThetaMode::Ops { epsilon_per_update } => {
                let a0 = config.ops_trunc(d).ok_or_else(|| {
                    contract("OPS updates need a truncation multiplier in the config")
                })?;
                let model: Model =
                    CategoricalDirichletModel::new(config.feature_dims[d], a0)?.into();
                Some((ops_temperature(&model, epsilon_per_update)?, model))
            }
        };
        for (k, n) in counts.iter().enumerate() {
            let shapes: Vec<f64> = n[range.clone()].iter().map(|c| c + config.beta).collect();
            let (post, fired) = floor_shapes(&PosteriorParams::from_shapes(&shapes));
            clamped |= fired;
            state.theta[k][d] = match &spec_model {
                None => dirichlet_draw(&post.shapes()?, rng)?,
                Some((spec, model)) => {
                    ledger.charge(
                        format!("{label}: theta[{k}][{d}] OPS update"),
                        PrivacyCost::pure(spec.epsilon_charged)?,
                        Composition::Parallel(format!("{label} feature {d}")),
                    );
                    ops_sample(model, &post, spec, rng)?
                }
            };
        }
    }
    Ok(clamped)
}

/// Laplace-privatize every observed cell's count vectors at per-feature
/// budget `ε/D`. Cells are disjoint sets of records, so charges compose in
/// parallel within a feature and sequentially across features.
pub fn privatize_hmm_counts<R: Rng + ?Sized>(
    data: &HmmData,
    epsilon: f64,
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<HmmData> {
    if data.is_privatized() {
        return Err(contract("data are already privatized"));
    }
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let n_features = data.feature_dims().len();
    let eps_d = epsilon / n_features as f64;
    let mut out = data.clone();
    out.mark_privatized();
    let width = data.cell_width();
    for d in 0..n_features {
        let range = data.feature_range(d);
        let model: Model = CategoricalDirichletModel::new(data.feature_dims()[d], 0.0)?.into();
        let group = format!("laplace counts feature {d}");
        for r in 0..data.n_regions() {
            for t in 0..data.n_timesteps() {
                if !data.is_observed(r, t) {
                    continue;
                }
                let raw =
                    SuffStats::new(data.feature_counts(r, t, d).to_vec(), data.n_entries(r, t));
                let noised = privatize_stats(&model, &raw, eps_d, rng)?;
                let start = data.cell_index(r, t) * width;
                out.counts_mut()[start + range.start..start + range.end]
                    .copy_from_slice(&noised.stats);
                ledger.charge(
                    format!("laplace counts cell ({r}, {t}) feature {d}"),
                    PrivacyCost::pure(eps_d)?,
                    Composition::Parallel(group.clone()),
                );
            }
        }
    }
    Ok(out)
}

/// One retained post-burn-in draw.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmSample {
    pub z: Vec<usize>,
    pub theta: Vec<Vec<Vec<f64>>>,
    pub trans_counts: Vec<Vec<u64>>,
}

/// Output of [`fit`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub mode: FitMode,
    pub n_regions: usize,
    pub n_timesteps: usize,
    /// Most frequent post-burn-in state per cell, ties to the lower label.
    pub z_mode: Vec<usize>,
    /// Point estimate of `θ`: the posterior mean given the final assignments
    /// (on the counts the sampler saw), or the final draw in OPS mode.
    pub theta_estimate: Vec<Vec<Vec<f64>>>,
    pub samples: Vec<HmmSample>,
    pub final_state: HmmState,
    pub ledger: Ledger,
    /// OPS only: cost if the final state is a converged posterior sample.
    pub converged_cost: Option<PrivacyCost>,
    /// Composed ledger total.
    pub total_cost: PrivacyCost,
    /// The shape floor fired at least once.
    pub clamp_fired: bool,
}

impl FitResult {
    /// Samples used for held-out scoring: all retained ones, or only the
    /// final one in OPS mode.
    pub fn eval_samples(&self) -> &[HmmSample] {
        match self.mode {
            FitMode::Ops { .. } => std::slice::from_ref(
                self.samples
                    .last()
                    .expect("fit retains at least one sample"),
            ),
            _ => &self.samples,
        }
    }
}

/// One Gibbs sweep over all cells in a fresh random order.
pub fn z_sweep<R: Rng + ?Sized>(
    state: &mut HmmState,
    data: &HmmData,
    config: &HmmConfig,
    rng: &mut R,
) {
    if config.n_states == 1 {
        return;
    }
    let log_theta = flat_log_theta(state);
    let mut order: Vec<(usize, usize)> = (0..data.n_regions())
        .flat_map(|r| (0..data.n_timesteps()).map(move |t| (r, t)))
        .collect();
    order.shuffle(rng);
    for (r, t) in order {
        state.remove_transitions(r, t);
        let lp =
            ln_z_conditional_excluded(state, &state.trans_counts, &log_theta, data, config, r, t);
        let k = categorical_draw(&normalize_ln(&lp), rng);
        state.set_and_add_transitions(r, t, k);
    }
}

/// Run the partially collapsed Gibbs sampler from a random initialization.
pub fn fit<R: Rng + ?Sized>(
    config: &HmmConfig,
    data: &HmmData,
    mode: FitMode,
    n_iters: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<FitResult> {
    let trunc = |d| match mode {
        FitMode::Ops { .. } => config.ops_trunc(d),
        _ => None,
    };
    let init = HmmState::initialize(config, data.n_regions(), data.n_timesteps(), trunc, rng)?;
    fit_from(config, data, mode, n_iters, burn_in, init, rng)
}

/// [`fit`] from a given initial state.
pub fn fit_from<R: Rng + ?Sized>(
    config: &HmmConfig,
    data: &HmmData,
    mode: FitMode,
    n_iters: usize,
    burn_in: usize,
    init: HmmState,
    rng: &mut R,
) -> Result<FitResult> {
    config.validate()?;
    if n_iters <= burn_in {
        return Err(domain(format!(
            "n_iters ({n_iters}) must exceed burn_in ({burn_in})"
        )));
    }
    if data.feature_dims() != config.feature_dims.as_slice() {
        return Err(contract("data and config feature dims differ"));
    }
    if init.n_regions() != data.n_regions() || init.n_timesteps() != data.n_timesteps() {
        return Err(contract("initial state and data grids differ"));
    }
    if init.n_states() != config.n_states {
        return Err(contract(
            "initial state and config disagree on the number of states",
        ));
    }
    let d = config.n_features() as f64;
    let mut ledger = Ledger::new();
    let privatized;
    let (data, theta_mode, converged_cost) = match mode {
        FitMode::Nonprivate => (data, ThetaMode::Exact, None),
        FitMode::Laplace { epsilon } => {
            // the sampler never sees the raw counts past this point
            privatized = privatize_hmm_counts(data, epsilon, &mut ledger, rng)?;
            (&privatized, ThetaMode::Exact, None)
        }
        FitMode::Ops { epsilon } => {
            if !(epsilon > 0.0) {
                return Err(domain(format!("epsilon must be positive, got {epsilon}")));
            }
            (
                data,
                ThetaMode::Ops {
                    epsilon_per_update: epsilon / d,
                },
                Some(PrivacyCost::pure(epsilon)?),
            )
        }
    };

    let mut state = init;
    let mut samples = Vec::with_capacity(n_iters - burn_in);
    let mut clamp_fired = false;
    for iter in 0..n_iters {
        z_sweep(&mut state, data, config, rng);
        debug_assert!(state.trans_counts_consistent());
        let label = format!("iter {iter}");
        if let FitMode::Ops { epsilon } = mode {
            ledger.charge_noted(
                format!("{label}: z sweep"),
                PrivacyCost::pure(epsilon)?,
                Composition::Sequential,
                "worst-case bookkeeping for the latent-variable sweep",
            );
        }
        clamp_fired |= theta_update(
            &mut state,
            data,
            config,
            theta_mode,
            &mut ledger,
            &label,
            rng,
        )?;
        if iter >= burn_in {
            samples.push(HmmSample {
                z: state.z.clone(),
                theta: state.theta.clone(),
                trans_counts: state.trans_counts.clone(),
            });
        }
    }

    let z_mode = most_frequent(&samples, config.n_states, data.n_cells());
    let theta_estimate = match mode {
        FitMode::Ops { .. } => state.theta.clone(),
        _ => posterior_mean_theta(&state, data, config),
    };
    Ok(FitResult {
        mode,
        n_regions: data.n_regions(),
        n_timesteps: data.n_timesteps(),
        z_mode,
        theta_estimate,
        samples,
        final_state: state,
        total_cost: ledger.total(),
        ledger,
        converged_cost,
        clamp_fired,
    })
}

fn most_frequent(samples: &[HmmSample], n_states: usize, n_cells: usize) -> Vec<usize> {
    let mut tally = vec![vec![0usize; n_states]; n_cells];
    for s in samples {
        for (c, &k) in s.z.iter().enumerate() {
            tally[c][k] += 1;
        }
    }
    tally
        .iter()
        .map(|row| {
            let best = *row.iter().max().expect("at least one state");
            row.iter().position(|&v| v == best).expect("max is present")
        })
        .collect()
}

/// `E[θ^{(k,d)} | X, z] = (n_{k,d} + β) / Σ (n_{k,d} + β)`.
pub fn posterior_mean_theta(
    state: &HmmState,
    data: &HmmData,
    config: &HmmConfig,
) -> Vec<Vec<Vec<f64>>> {
    let counts = state_counts(state, data);
    counts
        .iter()
        .map(|n| {
            (0..config.n_features())
                .map(|d| {
                    let shapes: Vec<f64> = n[data.feature_range(d)]
                        .iter()
                        .map(|c| c + config.beta)
                        .collect();
                    let total: f64 = shapes.iter().sum();
                    shapes.iter().map(|s| s / total).collect()
                })
                .collect()
        })
        .collect()
}
