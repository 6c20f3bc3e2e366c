//! Synthetic event logs drawn from the HMM's generative process.

use anyhow::{bail, Result};
use privbayes::samplers::{categorical_draw, dirichlet_draw};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::events::{EventRecord, EventSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_regions: usize,
    pub n_timesteps: usize,
    pub n_states: usize,
    pub feature_dims: Vec<usize>,
    /// Records generated in every cell.
    pub records_per_cell: usize,
    /// Transition-row Dirichlet concentration.
    pub alpha: f64,
    /// Emission Dirichlet concentration.
    pub beta: f64,
    /// Fixed emission parameters `theta[k][d]` instead of prior draws.
    pub theta: Option<Vec<Vec<Vec<f64>>>>,
    /// Fixed `(K + 1) × K` transition matrix, row 0 for the start state.
    pub transition: Option<Vec<Vec<f64>>>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_regions: 5,
            n_timesteps: 24,
            n_states: 2,
            feature_dims: vec![4, 4, 4],
            records_per_cell: 1000,
            alpha: 1.0,
            beta: 1.0,
            theta: None,
            transition: None,
        }
    }
}

fn is_simplex(v: &[f64]) -> bool {
    v.iter().all(|&x| x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() < 1e-9
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_regions == 0 || self.n_timesteps == 0 || self.n_states == 0 {
            bail!("synth sizes must be positive");
        }
        if self.feature_dims.is_empty() || self.feature_dims.iter().any(|&k| k < 2) {
            bail!("synth.feature_dims needs at least one feature with ≥ 2 outcomes");
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            bail!("synth concentrations must be positive");
        }
        if let Some(theta) = &self.theta {
            let ok = theta.len() == self.n_states
                && theta.iter().all(|row| {
                    row.len() == self.feature_dims.len()
                        && row
                            .iter()
                            .zip(&self.feature_dims)
                            .all(|(v, &k)| v.len() == k && is_simplex(v))
                });
            if !ok {
                bail!(
                    "synth.theta must be {} × {:?} simplex vectors",
                    self.n_states,
                    self.feature_dims
                );
            }
        }
        if let Some(a) = &self.transition {
            if a.len() != self.n_states + 1
                || a.iter()
                    .any(|row| row.len() != self.n_states || !is_simplex(row))
            {
                bail!(
                    "synth.transition must be a {} × {} row-stochastic matrix",
                    self.n_states + 1,
                    self.n_states
                );
            }
        }
        Ok(())
    }

    pub fn region_label(&self, r: usize) -> String {
        let width = (self.n_regions.max(2) - 1).to_string().len();
        format!("r{r:0width$}")
    }
}

/// Generated data with the parameters and states that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub events: EventSet,
    /// True state per cell, row-major by region.
    pub z: Vec<usize>,
    pub transition: Vec<Vec<f64>>,
    pub theta: Vec<Vec<Vec<f64>>>,
}

/// Sample transition rows and emissions (unless fixed in the config), then
/// a state path per region starting from the dummy state, then records.
pub fn synth_generate<R: Rng + ?Sized>(cfg: &SynthConfig, rng: &mut R) -> Result<SynthOutput> {
    cfg.validate()?;
    let k = cfg.n_states;
    let transition = match &cfg.transition {
        Some(a) => a.clone(),
        None if k == 1 => vec![vec![1.0]; 2],
        None => (0..=k)
            .map(|_| dirichlet_draw(&vec![cfg.alpha; k], rng))
            .collect::<Result<_, _>>()?,
    };
    let theta = match &cfg.theta {
        Some(t) => t.clone(),
        None => (0..k)
            .map(|_| {
                cfg.feature_dims
                    .iter()
                    .map(|&kd| dirichlet_draw(&vec![cfg.beta; kd], rng))
                    .collect()
            })
            .collect::<Result<_, _>>()?,
    };

    let mut z = Vec::with_capacity(cfg.n_regions * cfg.n_timesteps);
    let mut records = Vec::with_capacity(z.capacity() * cfg.records_per_cell);
    for r in 0..cfg.n_regions {
        let region = cfg.region_label(r);
        let mut row = 0;
        for t in 0..cfg.n_timesteps {
            let s = categorical_draw(&transition[row], rng);
            z.push(s);
            row = s + 1;
            for _ in 0..cfg.records_per_cell {
                let features = theta[s].iter().map(|p| categorical_draw(p, rng)).collect();
                records.push(EventRecord {
                    region: region.clone(),
                    timestep: t as u32,
                    features,
                });
            }
        }
    }

    let events = EventSet {
        feature_names: (1..=cfg.feature_dims.len())
            .map(|d| format!("f{d}"))
            .collect(),
        domains: cfg
            .feature_dims
            .iter()
            .map(|&kd| (0..kd).map(|v| v.to_string()).collect())
            .collect(),
        regions: (0..cfg.n_regions).map(|r| cfg.region_label(r)).collect(),
        timesteps: (0..cfg.n_timesteps as u32).collect(),
        records,
    };
    Ok(SynthOutput {
        events,
        z,
        transition,
        theta,
    })
}
