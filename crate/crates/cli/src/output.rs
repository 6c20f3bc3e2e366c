//! Deterministic result files: CSV with a provenance comment, pretty JSON.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::events::EventSet;

/// Hex SHA-256 of the config's canonical JSON form. The output root and
/// thread count do not affect results and are left out.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let cfg = ExperimentConfig {
        out_dir: PathBuf::new(),
        threads: 0,
        ..cfg.clone()
    };
    let json = serde_json::to_string(&cfg).expect("config serializes");
    Sha256::digest(json.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn comment_line(hash: &str, seed: u64) -> String {
    format!("# config_sha256={hash} seed={seed}")
}

/// Render rows as CSV, preceded by `comment`.
pub fn csv_string(comment: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let body = String::from_utf8(w.into_inner().context("flushing csv")?)?;
    Ok(format!("{comment}\n{body}"))
}

/// An event set in the `region,timestep,f1,…` input schema, labels as values.
pub fn events_csv(events: &EventSet, comment: &str) -> Result<String> {
    let header: Vec<&str> = ["region", "timestep"]
        .into_iter()
        .chain(events.feature_names.iter().map(String::as_str))
        .collect();
    let rows: Vec<Vec<String>> = events
        .records
        .iter()
        .map(|r| {
            [r.region.clone(), r.timestep.to_string()]
                .into_iter()
                .chain(
                    r.features
                        .iter()
                        .enumerate()
                        .map(|(d, &v)| events.domains[d][v].clone()),
                )
                .collect()
        })
        .collect();
    csv_string(comment, &header, &rows)
}

/// `<out>/<experiment>/`, created on demand, stamping every CSV.
pub struct OutputDir {
    dir: PathBuf,
    comment: String,
}

impl OutputDir {
    pub fn create(root: &Path, experiment: &str, cfg: &ExperimentConfig) -> Result<Self> {
        let dir = root.join(experiment);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutputDir {
            dir,
            comment: comment_line(&config_hash(cfg), cfg.seed),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn comment(&self) -> &str {
        &self.comment
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        self.write_text(name, &csv_string(&self.comment, header, rows)?)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }
}
