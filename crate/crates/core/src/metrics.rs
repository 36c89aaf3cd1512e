//! Structural metrics used as regression features: degree statistics,
//! density and the mean local clustering coefficient (exact or sampled).
//!
//! Nodes with fewer than two neighbors contribute a clustering of 0 and are
//! still counted in the mean.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::seed;

/// Trials used by dataset pipelines when no count is configured.
pub const DEFAULT_TRIALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ClusteringMode {
    Exact,
    Approx { trials: usize, seed: u64 },
}

impl fmt::Display for ClusteringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusteringMode::Exact => f.write_str("exact"),
            ClusteringMode::Approx { trials, seed } => write!(f, "approx:{trials}:{seed}"),
        }
    }
}

impl FromStr for ClusteringMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(ClusteringMode::Exact);
        }
        let mut parts = s.split(':');
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("approx"), Some(t), Some(sd), None) => Ok(ClusteringMode::Approx {
                trials: t.parse().map_err(|_| format!("bad trial count in `{s}`"))?,
                seed: sd.parse().map_err(|_| format!("bad seed in `{s}`"))?,
            }),
            _ => Err(format!("unknown clustering mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub max_degree: usize,
    pub min_degree: usize,
    pub mean_degree: f64,
    pub mean_clustering: f64,
    pub clustering_mode: ClusteringMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub max: usize,
    pub min: usize,
    pub mean: f64,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let (mut max, mut min) = (0, usize::MAX);
    for d in g.degrees() {
        max = max.max(d);
        min = min.min(d);
    }
    Ok(DegreeStats {
        max,
        min,
        mean: 2.0 * g.edge_count() as f64 / g.node_count() as f64,
    })
}

pub fn density(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::UndefinedDensity);
    }
    Ok(2.0 * g.edge_count() as f64 / (n as f64 * (n - 1) as f64))
}

/// Number of edges among the neighbors of `v`.
fn closed_pairs(g: &Graph, v: NodeId) -> usize {
    let nv = g.neighbors(v);
    let mut closed = 0;
    for &u in nv {
        // Count each neighbor pair once: only partners w > u.
        let nu = g.neighbors(u);
        let (mut i, mut j) = (0, 0);
        while i < nv.len() && j < nu.len() {
            match nv[i].cmp(&nu[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if nv[i] > u {
                        closed += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    closed
}

pub fn local_clustering(g: &Graph, v: NodeId) -> f64 {
    let k = g.degree(v);
    if k < 2 {
        return 0.0;
    }
    closed_pairs(g, v) as f64 / (k * (k - 1) / 2) as f64
}

pub fn clustering_exact(g: &Graph) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.node_count();
    let sum: f64 = (0..n as NodeId).map(|v| local_clustering(g, v)).sum();
    Ok(sum / n as f64)
}

/// Wedge-sampling estimate of the mean clustering coefficient.
///
/// Each trial picks a node uniformly among those with degree >= 2 and two
/// distinct neighbors of it; the closed fraction is scaled by the share of
/// such nodes, which makes the estimate unbiased for the all-node mean.
pub fn clustering_approx(g: &Graph, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let candidates: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| g.degree(v) >= 2)
        .collect();
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let mut rng = seed::rng(seed);
    let mut closed = 0usize;
    for _ in 0..trials {
        let v = candidates[rng.random_range(0..candidates.len())];
        let nv = g.neighbors(v);
        let i = rng.random_range(0..nv.len());
        let mut j = rng.random_range(0..nv.len() - 1);
        if j >= i {
            j += 1;
        }
        if g.has_edge(nv[i], nv[j]) {
            closed += 1;
        }
    }
    let share = candidates.len() as f64 / g.node_count() as f64;
    Ok(closed as f64 / trials as f64 * share)
}

impl Default for ClusteringMode {
    fn default() -> Self {
        ClusteringMode::Approx {
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

pub fn compute_metrics(g: &Graph, clustering_mode: ClusteringMode) -> Result<GraphMetrics> {
    let deg = degree_stats(g)?;
    let mean_clustering = match clustering_mode {
        ClusteringMode::Exact => clustering_exact(g)?,
        ClusteringMode::Approx { trials, seed } => clustering_approx(g, trials, seed)?,
    };
    Ok(GraphMetrics {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        density: density(g)?,
        max_degree: deg.max,
        min_degree: deg.min,
        mean_degree: deg.mean,
        mean_clustering,
        clustering_mode,
    })
}

/// One row of the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub graph_id: String,
    pub metrics: GraphMetrics,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    graph_id: String,
    n: usize,
    m: usize,
    density: f64,
    max_degree: usize,
    min_degree: usize,
    mean_degree: f64,
    clustering: f64,
    clustering_mode: String,
}

pub const METRICS_HEADER: &str =
    "graph_id,n,m,density,max_degree,min_degree,mean_degree,clustering,clustering_mode";

pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        let m = &r.metrics;
        w.serialize(CsvRow {
            graph_id: r.graph_id.clone(),
            n: m.node_count,
            m: m.edge_count,
            density: m.density,
            max_degree: m.max_degree,
            min_degree: m.min_degree,
            mean_degree: m.mean_degree,
            clustering: m.mean_clustering,
            clustering_mode: m.clustering_mode.to_string(),
        })?;
    }
    if rows.is_empty() {
        w.write_record(METRICS_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<CsvRow>() {
        let r = rec?;
        let clustering_mode = r.clustering_mode.parse().map_err(|message| Error::Parse {
            line: rows.len() + 2,
            message,
        })?;
        rows.push(MetricsRow {
            graph_id: r.graph_id,
            metrics: GraphMetrics {
                node_count: r.n,
                edge_count: r.m,
                density: r.density,
                max_degree: r.max_degree,
                min_degree: r.min_degree,
                mean_degree: r.mean_degree,
                mean_clustering: r.clustering,
                clustering_mode,
            },
        });
    }
    Ok(rows)
}
