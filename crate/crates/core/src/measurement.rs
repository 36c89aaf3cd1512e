//! Per-epoch training-time observations.
//!
//! Times come either from an external runner (ingested as CSV) or from a
//! deterministic synthetic cost oracle that lets the pipeline run without
//! GPUs. The oracle is linear in edges, nodes and maximum degree above a hard
//! floor, scaled by a per-model multiplier and log-normal noise.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetManifest;
use crate::error::{Error, Result};
use crate::graph::parse_edge_list;
use crate::metrics::{compute_metrics, ClusteringMode, GraphMetrics};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GnnModelKind {
    #[serde(rename = "GCN", alias = "gcn")]
    Gcn,
    #[serde(rename = "GIN", alias = "gin")]
    Gin,
    #[serde(rename = "GAT", alias = "gat")]
    Gat,
    #[serde(rename = "SAGE", alias = "sage")]
    Sage,
}

impl GnnModelKind {
    pub const ALL: [GnnModelKind; 4] = [
        GnnModelKind::Gcn,
        GnnModelKind::Gin,
        GnnModelKind::Gat,
        GnnModelKind::Sage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GnnModelKind::Gcn => "GCN",
            GnnModelKind::Gin => "GIN",
            GnnModelKind::Gat => "GAT",
            GnnModelKind::Sage => "SAGE",
        }
    }
}

impl fmt::Display for GnnModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GnnModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        GnnModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown model kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "SPARSE", alias = "sparse")]
    Sparse,
    #[serde(rename = "EDGE_LIST", alias = "edge_list")]
    EdgeList,
}

impl Representation {
    pub const ALL: [Representation; 2] = [Representation::Sparse, Representation::EdgeList];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Sparse => "SPARSE",
            Representation::EdgeList => "EDGE_LIST",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Representation::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown representation `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub graph_id: String,
    pub model: GnnModelKind,
    pub repr: Representation,
    /// Mean per-epoch training time in milliseconds.
    pub epoch_time_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// ms
    pub intercept: f64,
    /// ms per edge
    pub per_edge: f64,
    /// ms per node
    pub per_node: f64,
    /// ms per unit of maximum degree
    pub per_max_degree: f64,
}

impl CostCoefficients {
    fn linear(&self, met: &GraphMetrics) -> f64 {
        self.intercept
            + self.per_edge * met.edge_count as f64
            + self.per_node * met.node_count as f64
            + self.per_max_degree * met.max_degree as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMultipliers {
    pub gcn: f64,
    pub gin: f64,
    pub gat: f64,
    pub sage: f64,
}

impl ModelMultipliers {
    pub fn get(&self, kind: GnnModelKind) -> f64 {
        match kind {
            GnnModelKind::Gcn => self.gcn,
            GnnModelKind::Gin => self.gin,
            GnnModelKind::Gat => self.gat,
            GnnModelKind::Sage => self.sage,
        }
    }
}

/// Synthetic cost-model constants. The defaults are plumbing values chosen so
/// the two representations cross over inside the generated corpus: edge
/// lists are cheaper per edge, sparse products tolerate hubs better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleParams {
    pub sparse: CostCoefficients,
    pub edge_list: CostCoefficients,
    pub multipliers: ModelMultipliers,
    /// Floor applied to the linear part, ms.
    pub t_min: f64,
    /// Standard deviation of the log-scale noise.
    pub sigma: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            sparse: CostCoefficients {
                intercept: 0.8,
                per_edge: 4.0e-5,
                per_node: 1.0e-5,
                per_max_degree: 2.0e-4,
            },
            edge_list: CostCoefficients {
                intercept: 0.5,
                per_edge: 2.5e-5,
                per_node: 0.5e-5,
                per_max_degree: 2.0e-3,
            },
            multipliers: ModelMultipliers {
                gcn: 1.0,
                gin: 1.1,
                gat: 1.5,
                sage: 1.2,
            },
            t_min: 2.0,
            sigma: 0.03,
        }
    }
}

impl OracleParams {
    pub fn coefficients(&self, repr: Representation) -> &CostCoefficients {
        match repr {
            Representation::Sparse => &self.sparse,
            Representation::EdgeList => &self.edge_list,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs_ok = |c: &CostCoefficients| {
            [c.intercept, c.per_edge, c.per_node, c.per_max_degree]
                .iter()
                .all(|&x| x >= 0.0 && x.is_finite())
        };
        let m = &self.multipliers;
        let mult_ok = [m.gcn, m.gin, m.gat, m.sage].iter().all(|&x| x > 0.0 && x.is_finite());
        if !coeffs_ok(&self.sparse) || !coeffs_ok(&self.edge_list) || !mult_ok {
            return Err(Error::InvalidParams("oracle coefficients must be non-negative".into()));
        }
        if !(self.t_min > 0.0) || !(self.sigma >= 0.0) {
            return Err(Error::InvalidParams("oracle needs t_min > 0 and sigma >= 0".into()));
        }
        Ok(())
    }
}

/// Synthetic per-epoch time in ms for one (graph, model, representation).
pub fn oracle_time(
    graph_id: &str,
    met: &GraphMetrics,
    model: GnnModelKind,
    repr: Representation,
    p: &OracleParams,
    seed: u64,
) -> f64 {
    let base = p.coefficients(repr).linear(met).max(p.t_min) * p.multipliers.get(model);
    if p.sigma == 0.0 {
        return base;
    }
    let mut rng = seed::rng_for(
        seed,
        &[b"oracle", graph_id.as_bytes(), model.name().as_bytes(), repr.name().as_bytes()],
    );
    let eps = Normal::new(0.0, p.sigma)
        .expect("sigma validated non-negative")
        .sample(&mut rng);
    base * eps.exp()
}

/// Oracle timings for every (entry, model, representation) of a manifest.
///
/// Metrics are taken from `metrics` when present, then from the manifest
/// entry, and otherwise computed from the entry's graph file under
/// `manifest_dir`.
pub fn measure_manifest(
    manifest: &DatasetManifest,
    manifest_dir: &Path,
    metrics: &HashMap<String, GraphMetrics>,
    models: &[GnnModelKind],
    p: &OracleParams,
    seed: u64,
) -> Result<Vec<TimingRecord>> {
    p.validate()?;
    let mut records = Vec::with_capacity(manifest.entries.len() * models.len() * 2);
    for entry in &manifest.entries {
        let computed;
        let met = match metrics.get(&entry.graph_id).or(entry.metrics.as_ref()) {
            Some(m) => m,
            None => {
                let path = manifest_dir.join(&entry.file);
                if !path.exists() {
                    return Err(Error::MissingFile(path));
                }
                let g = parse_edge_list(&fs::read_to_string(&path)?)?;
                computed = compute_metrics(&g, ClusteringMode::default())?;
                &computed
            }
        };
        for &model in models {
            for repr in Representation::ALL {
                records.push(TimingRecord {
                    graph_id: entry.graph_id.clone(),
                    model,
                    repr,
                    epoch_time_ms: oracle_time(&entry.graph_id, met, model, repr, p, seed),
                });
            }
        }
    }
    Ok(records)
}

pub const TIMINGS_HEADER: [&str; 4] = ["graph_id", "model", "representation", "epoch_time_ms"];

/// Writes the timing CSV with six decimal places.
pub fn write_timings<W: Write>(out: W, records: &[TimingRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMINGS_HEADER)?;
    for r in records {
        w.write_record([
            r.graph_id.as_str(),
            r.model.name(),
            r.repr.name(),
            &format!("{:.6}", r.epoch_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses and validates a timing CSV.
pub fn ingest_timings<R: Read>(input: R) -> Result<Vec<TimingRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    let matches = header.len() == TIMINGS_HEADER.len()
        && header.iter().zip(TIMINGS_HEADER).all(|(a, b)| a.eq_ignore_ascii_case(b));
    if !matches {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", TIMINGS_HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    let mut keys = HashSet::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, found {}", row.len()),
            });
        }
        let model: GnnModelKind = row[1].parse().map_err(|_| Error::UnknownModel {
            line,
            name: row[1].to_string(),
        })?;
        let repr: Representation = row[2].parse().map_err(|_| Error::UnknownRepresentation {
            line,
            name: row[2].to_string(),
        })?;
        let epoch_time_ms = row[3]
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| Error::InvalidTime {
                line,
                value: row[3].to_string(),
            })?;
        let graph_id = row[0].to_string();
        if !keys.insert((graph_id.clone(), model, repr)) {
            return Err(Error::DuplicateKey {
                line,
                graph_id,
                model: model.to_string(),
                repr: repr.to_string(),
            });
        }
        records.push(TimingRecord {
            graph_id,
            model,
            repr,
            epoch_time_ms,
        });
    }
    Ok(records)
}
