use serde::Serialize;

use crate::error::{contract, domain, Result};

/// Model dimensions and hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HmmConfig {
    /// Number of hidden states `K`; `K = 1` is naive Bayes.
    pub n_states: usize,
    /// Outcome count `K_d` of each categorical feature.
    pub feature_dims: Vec<usize>,
    /// Concentration of the transition-row Dirichlet prior.
    pub alpha: f64,
    /// Concentration of the emission Dirichlet prior.
    pub beta: f64,
    /// OPS truncation multiplier `M`, giving `a0 = 1/(M K_d)`.
    pub ops_trunc_multiplier: Option<f64>,
}

impl HmmConfig {
    pub fn new(n_states: usize, feature_dims: Vec<usize>, alpha: f64, beta: f64) -> Result<Self> {
        let c = HmmConfig {
            n_states,
            feature_dims,
            alpha,
            beta,
            ops_trunc_multiplier: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_ops_trunc(mut self, multiplier: f64) -> Result<Self> {
        self.ops_trunc_multiplier = Some(multiplier);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            return Err(domain("an HMM needs at least one state"));
        }
        if self.feature_dims.is_empty() {
            return Err(domain("an HMM needs at least one feature"));
        }
        if let Some(k) = self.feature_dims.iter().find(|&&k| k < 2) {
            return Err(domain(format!(
                "every feature needs at least 2 outcomes, got {k}"
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite() && self.beta > 0.0 && self.beta.is_finite())
        {
            return Err(domain(format!(
                "concentrations must be positive, got alpha {} beta {}",
                self.alpha, self.beta
            )));
        }
        if let Some(m) = self.ops_trunc_multiplier {
            if !(m > 1.0 && m.is_finite()) {
                return Err(domain(format!(
                    "truncation multiplier must exceed 1, got {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.feature_dims.len()
    }

    /// OPS truncation floor for feature `d`, if a multiplier is set.
    pub fn ops_trunc(&self, d: usize) -> Option<f64> {
        self.ops_trunc_multiplier
            .map(|m| 1.0 / (m * self.feature_dims[d] as f64))
    }
}

/// Per-cell outcome counts on a rectangular `regions × timesteps` grid.
///
/// Counts of all features for one cell are stored back to back. Cells with
/// `observed = false` stay in the chain but carry no emission evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmData {
    n_regions: usize,
    n_timesteps: usize,
    feature_dims: Vec<usize>,
    offsets: Vec<usize>,
    counts: Vec<f64>,
    n_entries: Vec<u64>,
    observed: Vec<bool>,
    privatized: bool,
}

impl HmmData {
    /// All-zero data, every cell observed.
    pub fn new(n_regions: usize, n_timesteps: usize, feature_dims: Vec<usize>) -> Result<Self> {
        if n_regions == 0 || n_timesteps == 0 {
            return Err(domain(
                "data grid must have at least one region and one timestep",
            ));
        }
        if feature_dims.is_empty() || feature_dims.iter().any(|&k| k < 2) {
            return Err(domain(format!("invalid feature dims {feature_dims:?}")));
        }
        let mut offsets = Vec::with_capacity(feature_dims.len() + 1);
        offsets.push(0);
        for k in &feature_dims {
            offsets.push(offsets.last().unwrap() + k);
        }
        let cells = n_regions * n_timesteps;
        Ok(HmmData {
            n_regions,
            n_timesteps,
            counts: vec![0.0; cells * offsets[feature_dims.len()]],
            feature_dims,
            offsets,
            n_entries: vec![0; cells],
            observed: vec![true; cells],
            privatized: false,
        })
    }

    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    pub fn n_timesteps(&self) -> usize {
        self.n_timesteps
    }

    pub fn n_cells(&self) -> usize {
        self.n_regions * self.n_timesteps
    }

    pub fn feature_dims(&self) -> &[usize] {
        &self.feature_dims
    }

    pub fn is_privatized(&self) -> bool {
        self.privatized
    }

    /// Total number of count slots per cell, `Σ_d K_d`.
    pub fn cell_width(&self) -> usize {
        self.offsets[self.feature_dims.len()]
    }

    pub fn cell_index(&self, r: usize, t: usize) -> usize {
        debug_assert!(r < self.n_regions && t < self.n_timesteps);
        r * self.n_timesteps + t
    }

    /// Feature `d`'s slot range within a cell.
    pub fn feature_range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    /// All features' counts for cell `(r, t)`, concatenated.
    pub fn cell_counts(&self, r: usize, t: usize) -> &[f64] {
        let w = self.cell_width();
        let c = self.cell_index(r, t);
        &self.counts[c * w..(c + 1) * w]
    }

    pub fn feature_counts(&self, r: usize, t: usize, d: usize) -> &[f64] {
        let range = self.feature_range(d);
        &self.cell_counts(r, t)[range]
    }

    pub fn n_entries(&self, r: usize, t: usize) -> u64 {
        self.n_entries[self.cell_index(r, t)]
    }

    pub fn is_observed(&self, r: usize, t: usize) -> bool {
        self.observed[self.cell_index(r, t)]
    }

    /// Add one record with outcome `values[d] ∈ 0..K_d` per feature.
    pub fn add_record(&mut self, r: usize, t: usize, values: &[usize]) -> Result<()> {
        if self.privatized {
            return Err(contract("cannot add raw records to privatized data"));
        }
        if r >= self.n_regions || t >= self.n_timesteps {
            return Err(domain(format!(
                "cell ({r}, {t}) outside the {}×{} grid",
                self.n_regions, self.n_timesteps
            )));
        }
        if values.len() != self.feature_dims.len() {
            return Err(domain(format!(
                "expected {} features, got {}",
                self.feature_dims.len(),
                values.len()
            )));
        }
        for (d, (&v, &k)) in values.iter().zip(&self.feature_dims).enumerate() {
            if v >= k {
                return Err(domain(format!("feature {d} value {v} outside 0..{k}")));
            }
        }
        let w = self.cell_width();
        let c = self.cell_index(r, t);
        for (d, &v) in values.iter().enumerate() {
            self.counts[c * w + self.offsets[d] + v] += 1.0;
        }
        self.n_entries[c] += 1;
        Ok(())
    }

    /// Overwrite a cell's counts. Raw counts must be nonnegative integers
    /// summing to the same total for every feature.
    pub fn set_cell(&mut self, r: usize, t: usize, counts: &[f64]) -> Result<()> {
        if counts.len() != self.cell_width() {
            return Err(domain(format!(
                "expected {} counts, got {}",
                self.cell_width(),
                counts.len()
            )));
        }
        if counts.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(domain("counts must be finite and nonnegative"));
        }
        let total = counts[self.feature_range(0)].iter().sum::<f64>();
        if !self.privatized {
            if counts.iter().any(|c| c.fract() != 0.0) {
                return Err(domain("raw counts must be integers"));
            }
            for d in 1..self.feature_dims.len() {
                if counts[self.feature_range(d)].iter().sum::<f64>() != total {
                    return Err(domain(format!(
                        "feature {d} counts do not sum to the cell total {total}"
                    )));
                }
            }
        }
        let w = self.cell_width();
        let c = self.cell_index(r, t);
        self.counts[c * w..(c + 1) * w].copy_from_slice(counts);
        if !self.privatized {
            self.n_entries[c] = total as u64;
        }
        Ok(())
    }

    /// Copy with the listed cells hidden: counts zeroed and marked unobserved.
    pub fn without_cells(&self, cells: &[(usize, usize)]) -> Result<HmmData> {
        let mut out = self.clone();
        let w = self.cell_width();
        for &(r, t) in cells {
            if r >= self.n_regions || t >= self.n_timesteps {
                return Err(domain(format!("cell ({r}, {t}) outside the grid")));
            }
            let c = self.cell_index(r, t);
            out.counts[c * w..(c + 1) * w].fill(0.0);
            out.n_entries[c] = 0;
            out.observed[c] = false;
        }
        Ok(out)
    }

    /// Copy of the raw counts of the listed cells, for held-out scoring.
    pub fn extract_cells(&self, cells: &[(usize, usize)]) -> Result<Vec<HeldoutCell>> {
        cells
            .iter()
            .map(|&(r, t)| {
                if r >= self.n_regions || t >= self.n_timesteps {
                    return Err(domain(format!("cell ({r}, {t}) outside the grid")));
                }
                Ok(HeldoutCell {
                    region: r,
                    timestep: t,
                    counts: self.cell_counts(r, t).to_vec(),
                })
            })
            .collect()
    }

    /// Check the raw-count invariant on every cell.
    pub fn check(&self) -> Result<()> {
        if self.counts.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(contract("counts must be finite and nonnegative"));
        }
        if self.privatized {
            return Ok(());
        }
        for r in 0..self.n_regions {
            for t in 0..self.n_timesteps {
                let n = self.n_entries(r, t) as f64;
                for d in 0..self.feature_dims.len() {
                    let f = self.feature_counts(r, t, d);
                    if f.iter().any(|c| c.fract() != 0.0) || f.iter().sum::<f64>() != n {
                        return Err(contract(format!(
                            "cell ({r}, {t}) feature {d} counts do not sum to {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [f64] {
        &mut self.counts
    }

    pub(crate) fn mark_privatized(&mut self) {
        self.privatized = true;
    }
}

/// Raw counts of one cell kept out of training.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldoutCell {
    pub region: usize,
    pub timestep: usize,
    pub counts: Vec<f64>,
}
