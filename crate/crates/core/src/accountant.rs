//! Privacy-budget bookkeeping.
//!
//! Costs are `(ε, δ)` pairs. A [`Ledger`] is an append-only list of charges,
//! each tagged either as part of the sequential stream or as a member of a
//! named parallel group. Members of one parallel group are asserted by the
//! caller to have touched disjoint records, so the group costs the maximum of
//! its members; everything else adds up.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Result};

/// An `(ε, δ)` differential-privacy cost.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PrivacyCost {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyCost {
    pub const ZERO: PrivacyCost = PrivacyCost {
        epsilon: 0.0,
        delta: 0.0,
    };

    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || epsilon.is_nan() {
            return Err(domain(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(domain(format!("delta must lie in [0, 1], got {delta}")));
        }
        Ok(PrivacyCost { epsilon, delta })
    }

    /// Pure `ε`-differential privacy.
    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

/// Basic composition: costs add, with `δ` saturating at 1.
pub fn compose_sequential(costs: &[PrivacyCost]) -> PrivacyCost {
    let epsilon = exact_sum(costs.iter().map(|c| c.epsilon));
    let delta = exact_sum(costs.iter().map(|c| c.delta)).min(1.0);
    PrivacyCost { epsilon, delta }
}

/// Neumaier compensated sum, so long runs of equal fractional charges
/// (e.g. `ε/3` repeated) total the nominal budget.
fn exact_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Parallel composition over mechanisms on disjoint records: the maximum.
pub fn compose_parallel(costs: &[PrivacyCost]) -> PrivacyCost {
    costs.iter().fold(PrivacyCost::ZERO, |acc, c| PrivacyCost {
        epsilon: acc.epsilon.max(c.epsilon),
        delta: acc.delta.max(c.delta),
    })
}

/// Cost of a random-scan Gibbs sampler updating `q` of `n` variables, each
/// of which depends on a single record: `ε = 4 Δ q / n`.
pub fn amplify_random_scan(delta_log: f64, q: u64, n: u64) -> Result<PrivacyCost> {
    if !(delta_log > 0.0 && delta_log.is_finite()) {
        return Err(domain(format!(
            "sensitivity must be positive and finite, got {delta_log}"
        )));
    }
    if n == 0 {
        return Err(domain("record count n must be positive"));
    }
    if q > n {
        return Err(domain(format!(
            "cannot update q = {q} of n = {n} variables"
        )));
    }
    PrivacyCost::pure(4.0 * delta_log * q as f64 / n as f64)
}

/// How a ledger entry composes with the others.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "group", rename_all = "snake_case")]
pub enum Composition {
    Sequential,
    /// Members of the same group touched disjoint records.
    Parallel(String),
}

/// One charge against the budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub label: String,
    pub cost: PrivacyCost,
    pub composition: Composition,
    /// Set when `δ` is a Monte Carlo estimate rather than a proven bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Append-only record of privacy charges for one analysis run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ledger {
    entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(
        &mut self,
        label: impl Into<String>,
        cost: PrivacyCost,
        composition: Composition,
    ) {
        self.entries.push(LedgerEntry {
            label: label.into(),
            cost,
            composition,
            note: None,
        });
    }

    /// Charge with an annotation carried into the report.
    pub fn charge_noted(
        &mut self,
        label: impl Into<String>,
        cost: PrivacyCost,
        composition: Composition,
        note: impl Into<String>,
    ) {
        self.entries.push(LedgerEntry {
            label: label.into(),
            cost,
            composition,
            note: Some(note.into()),
        });
    }

    /// Append all entries of `other`.
    pub fn extend(&mut self, other: &Ledger) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Composed total: sequential entries add, each parallel group
    /// contributes its maximum.
    pub fn total(&self) -> PrivacyCost {
        let mut groups: BTreeMap<&str, Vec<PrivacyCost>> = BTreeMap::new();
        let mut sequential = Vec::new();
        for e in &self.entries {
            match &e.composition {
                Composition::Sequential => sequential.push(e.cost),
                Composition::Parallel(g) => groups.entry(g.as_str()).or_default().push(e.cost),
            }
        }
        sequential.extend(groups.values().map(|g| compose_parallel(g)));
        compose_sequential(&sequential)
    }

    /// True iff the composed total fits inside `budget`.
    pub fn assert_within(&self, budget: PrivacyCost) -> bool {
        let t = self.total();
        t.epsilon <= budget.epsilon && t.delta <= budget.delta
    }

    /// Serializable snapshot: entries plus the composed total.
    pub fn report(&self) -> LedgerReport<'_> {
        LedgerReport {
            entries: &self.entries,
            total: self.total(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LedgerReport<'a> {
    pub entries: &'a [LedgerEntry],
    pub total: PrivacyCost,
}
