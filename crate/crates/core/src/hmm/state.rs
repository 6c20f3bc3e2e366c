use rand::Rng;

use crate::error::{contract, domain, Result};
use crate::hmm::data::{HmmConfig, HmmData};
use crate::samplers::{dirichlet_draw, truncated_dirichlet_draw};
use crate::special::ln_sum_exp;

/// Row of `trans_counts` holding transitions out of `prev`; row 0 is the
/// dummy start state.
pub(crate) fn row_of(prev: Option<usize>) -> usize {
    prev.map_or(0, |k| k + 1)
}

/// Latent assignments, emission parameters and collapsed transition counts.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmState {
    n_regions: usize,
    n_timesteps: usize,
    /// State per cell, row-major by region.
    pub z: Vec<usize>,
    /// `theta[k][d]` is the outcome distribution of feature `d` in state `k`.
    pub theta: Vec<Vec<Vec<f64>>>,
    /// `(K + 1) × K` matrix; row 0 counts transitions out of the dummy state.
    pub trans_counts: Vec<Vec<u64>>,
}

impl HmmState {
    /// Build a state from explicit assignments and parameters.
    pub fn from_parts(
        config: &HmmConfig,
        n_regions: usize,
        n_timesteps: usize,
        z: Vec<usize>,
        theta: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let k = config.n_states;
        if z.len() != n_regions * n_timesteps {
            return Err(domain(format!(
                "expected {} assignments, got {}",
                n_regions * n_timesteps,
                z.len()
            )));
        }
        if let Some(bad) = z.iter().find(|&&s| s >= k) {
            return Err(domain(format!("state {bad} outside 0..{k}")));
        }
        if theta.len() != k || theta.iter().any(|row| row.len() != config.n_features()) {
            return Err(domain(
                "theta must have one row per state and one vector per feature",
            ));
        }
        for row in &theta {
            for (v, &kd) in row.iter().zip(&config.feature_dims) {
                let s: f64 = v.iter().sum();
                if v.len() != kd || v.iter().any(|&x| !(x >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                    return Err(domain(
                        "every theta vector must be a simplex point of its feature's dimension",
                    ));
                }
            }
        }
        let trans_counts = transition_counts(&z, n_regions, n_timesteps, k);
        Ok(HmmState {
            n_regions,
            n_timesteps,
            z,
            theta,
            trans_counts,
        })
    }

    /// Uniform random assignments and prior draws for `theta`, truncated at
    /// `trunc(d)` where given.
    pub fn initialize<R: Rng + ?Sized>(
        config: &HmmConfig,
        n_regions: usize,
        n_timesteps: usize,
        trunc: impl Fn(usize) -> Option<f64>,
        rng: &mut R,
    ) -> Result<Self> {
        let z = (0..n_regions * n_timesteps)
            .map(|_| rng.random_range(0..config.n_states))
            .collect();
        let mut theta = Vec::with_capacity(config.n_states);
        for _ in 0..config.n_states {
            let mut row = Vec::with_capacity(config.n_features());
            for (d, &kd) in config.feature_dims.iter().enumerate() {
                let shapes = vec![config.beta; kd];
                row.push(match trunc(d) {
                    Some(a0) => truncated_dirichlet_draw(&shapes, a0, rng)?,
                    None => dirichlet_draw(&shapes, rng)?,
                });
            }
            theta.push(row);
        }
        Self::from_parts(config, n_regions, n_timesteps, z, theta)
    }

    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    pub fn n_timesteps(&self) -> usize {
        self.n_timesteps
    }

    pub fn n_states(&self) -> usize {
        self.theta.len()
    }

    pub fn z_at(&self, r: usize, t: usize) -> usize {
        self.z[r * self.n_timesteps + t]
    }

    /// The same state with labels renamed `k → perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let k = self.n_states();
        let mut seen = vec![false; k];
        if perm.len() != k
            || perm
                .iter()
                .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(domain(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        let z: Vec<usize> = self.z.iter().map(|&s| perm[s]).collect();
        let mut theta = self.theta.clone();
        for (old, row) in self.theta.iter().enumerate() {
            theta[perm[old]] = row.clone();
        }
        let trans_counts = transition_counts(&z, self.n_regions, self.n_timesteps, k);
        Ok(HmmState {
            n_regions: self.n_regions,
            n_timesteps: self.n_timesteps,
            z,
            theta,
            trans_counts,
        })
    }

    /// True iff `trans_counts` agrees with a recount from `z`.
    pub fn trans_counts_consistent(&self) -> bool {
        self.trans_counts
            == transition_counts(&self.z, self.n_regions, self.n_timesteps, self.n_states())
    }

    /// Previous and next states around cell `(r, t)`.
    pub(crate) fn neighbors(&self, r: usize, t: usize) -> (Option<usize>, Option<usize>) {
        let prev = (t > 0).then(|| self.z_at(r, t - 1));
        let next = (t + 1 < self.n_timesteps).then(|| self.z_at(r, t + 1));
        (prev, next)
    }

    pub(crate) fn remove_transitions(&mut self, r: usize, t: usize) {
        let k = self.z_at(r, t);
        let (prev, next) = self.neighbors(r, t);
        self.trans_counts[row_of(prev)][k] -= 1;
        if let Some(n) = next {
            self.trans_counts[k + 1][n] -= 1;
        }
    }

    pub(crate) fn set_and_add_transitions(&mut self, r: usize, t: usize, k: usize) {
        self.z[r * self.n_timesteps + t] = k;
        let (prev, next) = self.neighbors(r, t);
        self.trans_counts[row_of(prev)][k] += 1;
        if let Some(n) = next {
            self.trans_counts[k + 1][n] += 1;
        }
    }
}

/// Count `(z_{t−1}, z_t)` pairs per region, with a dummy start before `t = 0`.
pub fn transition_counts(
    z: &[usize],
    n_regions: usize,
    n_timesteps: usize,
    n_states: usize,
) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; n_states]; n_states + 1];
    for r in 0..n_regions {
        let mut prev = None;
        for t in 0..n_timesteps {
            let s = z[r * n_timesteps + t];
            counts[row_of(prev)][s] += 1;
            prev = Some(s);
        }
    }
    counts
}

/// `Σ_d Σ_j n_{d,j} log θ_j^{(d)}` for one cell under one state's `theta`.
/// Zero counts contribute nothing; a positive count on a zero probability
/// gives `−∞`.
pub fn emission_loglik(counts_cell: &[f64], theta_k: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    for v in theta_k {
        for &p in v {
            let n = counts_cell[i];
            if n != 0.0 {
                total += n * p.ln();
            }
            i += 1;
        }
    }
    debug_assert_eq!(i, counts_cell.len());
    total
}

/// Collapsed transition log-factor for placing state `k` between `prev` and
/// `next`, given counts that exclude this cell's own transitions.
pub(crate) fn ln_transition_factor(
    counts: &[Vec<u64>],
    prev: Option<usize>,
    next: Option<usize>,
    k: usize,
    alpha: f64,
) -> f64 {
    let n_states = counts[0].len() as f64;
    let row = &counts[row_of(prev)];
    let row_total: u64 = row.iter().sum();
    let mut f = (row[k] as f64 + alpha).ln() - (row_total as f64 + n_states * alpha).ln();
    if let Some(n) = next {
        let same_prev = (prev == Some(k)) as u64;
        let same_all = (prev == Some(k) && k == n) as u64;
        let out = &counts[k + 1];
        let out_total: u64 = out.iter().sum();
        f += ((out[n] + same_all) as f64 + alpha).ln()
            - ((out_total + same_prev) as f64 + n_states * alpha).ln();
    }
    f
}

/// Unnormalized log conditional of `z_{r,t}` given everything else, with
/// `counts` already excluding the cell's transitions.
pub(crate) fn ln_z_conditional_excluded(
    state: &HmmState,
    counts: &[Vec<u64>],
    log_theta: &[Vec<f64>],
    data: &HmmData,
    config: &HmmConfig,
    r: usize,
    t: usize,
) -> Vec<f64> {
    let (prev, next) = state.neighbors(r, t);
    let observed = data.is_observed(r, t);
    let cell = data.cell_counts(r, t);
    (0..config.n_states)
        .map(|k| {
            let mut lp = ln_transition_factor(counts, prev, next, k, config.alpha);
            if observed {
                lp += dot_ln(cell, &log_theta[k]);
            }
            lp
        })
        .collect()
}

// Σ n_j ℓ_j skipping zero counts so that 0 · (−∞) stays 0.
pub(crate) fn dot_ln(counts: &[f64], log_theta: &[f64]) -> f64 {
    counts
        .iter()
        .zip(log_theta)
        .filter(|(n, _)| **n != 0.0)
        .map(|(n, l)| n * l)
        .sum()
}

pub(crate) fn flat_log_theta(state: &HmmState) -> Vec<Vec<f64>> {
    state
        .theta
        .iter()
        .map(|row| row.iter().flatten().map(|p| p.ln()).collect())
        .collect()
}

pub(crate) fn normalize_ln(lp: &[f64]) -> Vec<f64> {
    let z = ln_sum_exp(lp);
    lp.iter().map(|l| (l - z).exp()).collect()
}

/// `Pr(z_{r,t} = k | z_{¬(r,t)}, X, θ)` with transition probabilities
/// collapsed. `state.trans_counts` must count every transition implied by
/// `state.z`; the cell's own transitions are excluded internally.
pub fn z_conditional(
    r: usize,
    t: usize,
    state: &HmmState,
    data: &HmmData,
    config: &HmmConfig,
) -> Result<Vec<f64>> {
    if r >= state.n_regions || t >= state.n_timesteps {
        return Err(domain(format!("cell ({r}, {t}) outside the grid")));
    }
    if data.n_regions() != state.n_regions || data.n_timesteps() != state.n_timesteps {
        return Err(contract("data and state grids differ"));
    }
    let mut excluded = state.clone();
    excluded.remove_transitions(r, t);
    let lp = ln_z_conditional_excluded(
        state,
        &excluded.trans_counts,
        &flat_log_theta(state),
        data,
        config,
        r,
        t,
    );
    Ok(normalize_ln(&lp))
}
