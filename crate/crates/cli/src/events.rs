//! Event-log ingestion: `region,timestep,f1,…,fD` CSV files, preprocessing
//! rules, and conversion to per-cell count tensors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use privbayes::hmm::HmmData;
use serde::{Deserialize, Serialize};

/// One log entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub region: String,
    pub timestep: u32,
    /// Outcome index per feature.
    pub features: Vec<usize>,
}

/// Records plus their categorical domains and the region/timestep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSet {
    pub feature_names: Vec<String>,
    /// Outcome labels per feature, in index order.
    pub domains: Vec<Vec<String>>,
    pub regions: Vec<String>,
    pub timesteps: Vec<u32>,
    pub records: Vec<EventRecord>,
}

impl EventSet {
    pub fn feature_dims(&self) -> Vec<usize> {
        self.domains.iter().map(Vec::len).collect()
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| anyhow!("config error: unknown column '{name}'"))
    }

    /// Records per `(region, timestep)`.
    pub fn cell_counts(&self) -> BTreeMap<(String, u32), usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry((r.region.clone(), r.timestep)).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCount {
    pub region: String,
    pub timestep: u32,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub records: usize,
    pub feature_dims: Vec<usize>,
    pub cells: Vec<CellCount>,
    pub warnings: Vec<String>,
}

/// Read an event CSV. Lines starting with `#` are comments.
///
/// Without `declared` domains, a column whose values are all nonnegative
/// integers maps value `v` to index `v`; any other column maps its sorted
/// distinct labels to indices. Values outside a declared domain are
/// appended to it with a warning.
pub fn load_events_csv(
    path: &Path,
    declared: Option<&[Vec<String>]>,
) -> Result<(EventSet, LoadReport)> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_events(file, declared).with_context(|| format!("loading {}", path.display()))
}

pub fn load_events<R: Read>(
    reader: R,
    declared: Option<&[Vec<String>]>,
) -> Result<(EventSet, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().context("reading header")?.clone();
    if header.len() < 3 || &header[0] != "region" || &header[1] != "timestep" {
        bail!(
            "schema error: header must be region,timestep,f1,...,fD; got '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        );
    }
    let feature_names: Vec<String> = header.iter().skip(2).map(str::to_owned).collect();
    let d = feature_names.len();
    if let Some(dom) = declared {
        if dom.len() != d {
            bail!(
                "config error: {} declared domains for {d} feature columns",
                dom.len()
            );
        }
    }

    let mut raw = Vec::new();
    for row in rdr.records() {
        let row = row.context("reading row")?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != d + 2 {
            bail!(
                "line {line}: expected {} fields, found {}",
                d + 2,
                row.len()
            );
        }
        let timestep: u32 = row[1].parse().map_err(|_| {
            anyhow!(
                "line {line}: timestep '{}' is not a nonnegative integer",
                &row[1]
            )
        })?;
        if row[0].is_empty() {
            bail!("line {line}: empty region");
        }
        raw.push((
            row[0].to_owned(),
            timestep,
            row.iter().skip(2).map(str::to_owned).collect::<Vec<_>>(),
        ));
    }

    let mut warnings = Vec::new();
    if raw.is_empty() {
        warnings.push("no data rows".to_owned());
    }
    let mut domains: Vec<Vec<String>> = Vec::with_capacity(d);
    for j in 0..d {
        let values = raw.iter().map(|r| r.2[j].as_str());
        domains.push(match declared {
            Some(dom) => dom[j].clone(),
            None => infer_domain(values),
        });
    }
    let mut index: Vec<HashMap<String, usize>> = domains
        .iter()
        .map(|dom| {
            dom.iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i))
                .collect()
        })
        .collect();

    let mut records = Vec::with_capacity(raw.len());
    for (region, timestep, values) in raw {
        let mut features = Vec::with_capacity(d);
        for (j, v) in values.into_iter().enumerate() {
            let next = domains[j].len();
            let idx = *index[j].entry(v.clone()).or_insert_with(|| {
                warnings.push(format!(
                    "column '{}': value '{v}' outside the declared domain, assigned index {next}",
                    feature_names[j]
                ));
                domains[j].push(v.clone());
                next
            });
            features.push(idx);
        }
        records.push(EventRecord {
            region,
            timestep,
            features,
        });
    }

    let regions: Vec<String> = records
        .iter()
        .map(|r| r.region.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let timesteps = match (
        records.iter().map(|r| r.timestep).min(),
        records.iter().map(|r| r.timestep).max(),
    ) {
        (Some(lo), Some(hi)) => (lo..=hi).collect(),
        _ => Vec::new(),
    };
    let events = EventSet {
        feature_names,
        domains,
        regions,
        timesteps,
        records,
    };
    let report = LoadReport {
        records: events.records.len(),
        feature_dims: events.feature_dims(),
        cells: events
            .cell_counts()
            .into_iter()
            .map(|((region, timestep), records)| CellCount {
                region,
                timestep,
                records,
            })
            .collect(),
        warnings,
    };
    Ok((events, report))
}

fn infer_domain<'a>(values: impl Iterator<Item = &'a str> + Clone) -> Vec<String> {
    let numeric: Option<Vec<u64>> = values.clone().map(|v| v.parse::<u64>().ok()).collect();
    match numeric {
        Some(nums) => match nums.iter().max() {
            Some(&max) => (0..=max).map(|v| v.to_string()).collect(),
            None => Vec::new(),
        },
        None => values
            .map(str::to_owned)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    }
}

/// A disjunctive merge of several columns into one 0/1 indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeRule {
    pub columns: Vec<String>,
    pub into: String,
}

/// Preprocessing applied after loading, in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessRules {
    /// Count columns mapped to 0 (zero) / 1 (positive).
    pub binarize: Vec<String>,
    pub merge: Vec<MergeRule>,
    /// Region codes expected in the data even if they have no rows.
    pub known_regions: Vec<String>,
    /// Regions with fewer records are dropped.
    pub min_region_records: usize,
    /// Drop timesteps with no records in any region.
    pub drop_empty_timesteps: bool,
}

impl Default for PreprocessRules {
    fn default() -> Self {
        PreprocessRules {
            binarize: Vec::new(),
            merge: Vec::new(),
            known_regions: Vec::new(),
            min_region_records: 1,
            drop_empty_timesteps: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreprocessReport {
    pub records_in: usize,
    pub records_out: usize,
    pub binarized: Vec<String>,
    pub merged: Vec<MergeRule>,
    pub dropped_regions: Vec<(String, usize)>,
    pub dropped_timesteps: Vec<u32>,
    pub feature_names: Vec<String>,
    pub feature_dims: Vec<usize>,
}

fn is_positive(label: &str, column: &str) -> Result<bool> {
    let v: f64 = label.parse().map_err(|_| {
        anyhow!("column '{column}': value '{label}' is not numeric and cannot be binarized")
    })?;
    Ok(v > 0.0)
}

/// Apply binarization, disjunctive merges, then region and timestep drops.
pub fn preprocess(
    events: &EventSet,
    rules: &PreprocessRules,
) -> Result<(EventSet, PreprocessReport)> {
    let mut ev = events.clone();
    let binary = vec!["0".to_owned(), "1".to_owned()];

    for name in &rules.binarize {
        let j = ev.column(name)?;
        let map: Vec<usize> = ev.domains[j]
            .iter()
            .map(|l| is_positive(l, name).map(usize::from))
            .collect::<Result<_>>()?;
        for r in &mut ev.records {
            r.features[j] = map[r.features[j]];
        }
        ev.domains[j] = binary.clone();
    }

    for rule in &rules.merge {
        if rule.columns.is_empty() {
            bail!("config error: merge into '{}' lists no columns", rule.into);
        }
        let cols: Vec<usize> = rule
            .columns
            .iter()
            .map(|c| ev.column(c))
            .collect::<Result<_>>()?;
        let positive: Vec<Vec<bool>> = cols
            .iter()
            .map(|&j| {
                ev.domains[j]
                    .iter()
                    .map(|l| is_positive(l, &ev.feature_names[j]))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let keep: Vec<usize> = (0..ev.feature_names.len())
            .filter(|j| !cols.contains(j))
            .collect();
        for r in &mut ev.records {
            let any = cols
                .iter()
                .zip(&positive)
                .any(|(&j, pos)| pos[r.features[j]]);
            let mut f: Vec<usize> = keep.iter().map(|&j| r.features[j]).collect();
            f.push(usize::from(any));
            r.features = f;
        }
        ev.feature_names = keep
            .iter()
            .map(|&j| ev.feature_names[j].clone())
            .chain([rule.into.clone()])
            .collect();
        ev.domains = keep
            .iter()
            .map(|&j| ev.domains[j].clone())
            .chain([binary.clone()])
            .collect();
    }

    let mut per_region: BTreeMap<String, usize> = ev
        .regions
        .iter()
        .chain(&rules.known_regions)
        .map(|r| (r.clone(), 0))
        .collect();
    for r in &ev.records {
        *per_region.entry(r.region.clone()).or_insert(0) += 1;
    }
    let dropped_regions: Vec<(String, usize)> = per_region
        .iter()
        .filter(|(_, &n)| n < rules.min_region_records)
        .map(|(r, &n)| (r.clone(), n))
        .collect();
    ev.regions = per_region
        .keys()
        .filter(|r| !dropped_regions.iter().any(|(d, _)| d == *r))
        .cloned()
        .collect();
    ev.records
        .retain(|r| ev.regions.binary_search(&r.region).is_ok());

    let mut dropped_timesteps = Vec::new();
    if rules.drop_empty_timesteps {
        let used: BTreeSet<u32> = ev.records.iter().map(|r| r.timestep).collect();
        dropped_timesteps = ev
            .timesteps
            .iter()
            .copied()
            .filter(|t| !used.contains(t))
            .collect();
        ev.timesteps.retain(|t| used.contains(t));
    }

    let report = PreprocessReport {
        records_in: events.records.len(),
        records_out: ev.records.len(),
        binarized: rules.binarize.clone(),
        merged: rules.merge.clone(),
        dropped_regions,
        dropped_timesteps,
        feature_names: ev.feature_names.clone(),
        feature_dims: ev.feature_dims(),
    };
    Ok((ev, report))
}

/// Count tensor over the event set's region × timestep axes.
pub fn to_hmm_data(events: &EventSet) -> Result<HmmData> {
    let dims = events.feature_dims();
    if let Some((j, _)) = dims.iter().enumerate().find(|(_, &k)| k < 2) {
        bail!(
            "feature '{}' has fewer than 2 outcomes; declare its domain",
            events.feature_names[j]
        );
    }
    let mut data = HmmData::new(events.regions.len(), events.timesteps.len(), dims)?;
    let t_index: HashMap<u32, usize> = events
        .timesteps
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i))
        .collect();
    for rec in &events.records {
        let r = events.regions.binary_search(&rec.region).map_err(|_| {
            anyhow!(
                "record region '{}' missing from the region axis",
                rec.region
            )
        })?;
        let t = *t_index.get(&rec.timestep).ok_or_else(|| {
            anyhow!(
                "record timestep {} missing from the timestep axis",
                rec.timestep
            )
        })?;
        data.add_record(r, t, &rec.features)?;
    }
    Ok(data)
}
