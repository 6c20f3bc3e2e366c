//! Experiment runners. Each returns plain data; the command layer writes
//! files.

pub mod adversarial;
pub mod are;
pub mod beta_demo;
pub mod hmm;

use std::collections::BTreeMap;

use privbayes::Ledger;
use serde_json::Value;

/// Named ledgers as one JSON object: name → `{entries, total}`.
pub fn ledgers_json(ledgers: &BTreeMap<String, Ledger>) -> Value {
    Value::Object(
        ledgers
            .iter()
            .map(|(name, l)| {
                (
                    name.clone(),
                    serde_json::to_value(l.report()).expect("ledger serializes"),
                )
            })
            .collect(),
    )
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
