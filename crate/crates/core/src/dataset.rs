//! Synthetic training corpus construction.
//!
//! Naively sampled RMAT parameters over-produce graphs with low clustering.
//! The balanced builder counters this with stratified acceptance: candidates
//! are binned on a (log10 edges, clustering) grid and a candidate is kept only
//! while its bin is below quota.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{compute_metrics, ClusteringMode, GraphMetrics, DEFAULT_TRIALS};
use crate::rmat::{generate_rmat, sample_params, ParamDistribution, RmatParams};
use crate::seed;

pub const MANIFEST_VERSION: u32 = 1;

/// Candidate generations allowed per requested graph.
pub const ATTEMPT_FACTOR: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BalanceGrid {
    pub edge_bins: usize,
    pub log_edges: [f64; 2],
    pub clustering_bins: usize,
    pub clustering: [f64; 2],
}

impl Default for BalanceGrid {
    fn default() -> Self {
        BalanceGrid {
            edge_bins: 6,
            log_edges: [3.0, 6.0],
            clustering_bins: 5,
            clustering: [0.0, 1.0],
        }
    }
}

fn bin_of(x: f64, [lo, hi]: [f64; 2], bins: usize) -> usize {
    let t = ((x - lo) / (hi - lo) * bins as f64).floor();
    if t.is_nan() || t < 0.0 {
        0
    } else {
        (t as usize).min(bins - 1)
    }
}

impl BalanceGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if self.edge_bins == 0 || self.clustering_bins == 0 || !ok(self.log_edges) || !ok(self.clustering) {
            return Err(Error::InvalidParams("balance grid needs non-empty bins and ranges".into()));
        }
        Ok(())
    }

    pub fn bin_count(&self) -> usize {
        self.edge_bins * self.clustering_bins
    }

    /// Flat bin index; values outside the grid fall into the nearest edge bin.
    pub fn bin(&self, edges: usize, clustering: f64) -> usize {
        let e = bin_of((edges.max(1) as f64).log10(), self.log_edges, self.edge_bins);
        let c = bin_of(clustering, self.clustering, self.clustering_bins);
        e * self.clustering_bins + c
    }

    pub fn quota(&self, count: usize) -> usize {
        count.div_ceil(self.bin_count())
    }

    pub fn bin_edges(&self) -> (Vec<f64>, Vec<f64>) {
        let edges = |[lo, hi]: [f64; 2], n: usize| -> Vec<f64> {
            (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
        };
        (
            edges(self.log_edges, self.edge_bins),
            edges(self.clustering, self.clustering_bins),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub graph_id: String,
    /// Edge-list file, relative to the manifest's directory.
    pub file: String,
    pub seed: u64,
    pub params: RmatParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<GraphMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfilledBin {
    pub edge_bin: usize,
    pub clustering_bin: usize,
    pub have: usize,
    pub quota: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shortfall {
    pub missing: usize,
    pub unfilled: Vec<UnfilledBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub seed: u64,
    pub requested: usize,
    pub balanced: bool,
    pub attempts: usize,
    pub distribution: ParamDistribution,
    pub grid: BalanceGrid,
    pub log_edge_bin_edges: Vec<f64>,
    pub clustering_bin_edges: Vec<f64>,
    pub entries: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortfall: Option<Shortfall>,
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: DatasetManifest = serde_json::from_str(text)?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Version {
                found: m.version,
                expected: MANIFEST_VERSION,
            });
        }
        let mut ids = std::collections::HashSet::new();
        for e in &m.entries {
            if !ids.insert(e.graph_id.as_str()) {
                return Err(Error::InvalidParams(format!("duplicate graph id `{}`", e.graph_id)));
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Number of entries per grid bin, using each entry's recorded metrics.
    pub fn occupancy(&self) -> Vec<usize> {
        let mut occ = vec![0; self.grid.bin_count()];
        for m in self.entries.iter().filter_map(|e| e.metrics.as_ref()) {
            occ[self.grid.bin(m.edge_count, m.mean_clustering)] += 1;
        }
        occ
    }
}

/// Population coefficient of variation (std / mean).
pub fn coefficient_of_variation(counts: &[usize]) -> f64 {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub count: usize,
    pub distribution: ParamDistribution,
    pub grid: BalanceGrid,
    pub seed: u64,
    pub balance: bool,
    pub attempt_factor: usize,
    /// Wedge-sampling trials for the clustering used in binning.
    pub trials: usize,
    pub workers: usize,
}

impl DatasetSpec {
    pub fn new(count: usize, seed: u64, balance: bool) -> Self {
        DatasetSpec {
            count,
            distribution: ParamDistribution::default(),
            grid: BalanceGrid::default(),
            seed,
            balance,
            attempt_factor: ATTEMPT_FACTOR,
            trials: DEFAULT_TRIALS,
            workers: 1,
        }
    }
}

pub fn candidate_seed(dataset_seed: u64, attempt: usize) -> u64 {
    seed::derive(dataset_seed, &[b"candidate", &(attempt as u64).to_le_bytes()])
}

pub fn graph_file(graph_id: &str) -> String {
    format!("graphs/{graph_id}.el")
}

struct Candidate {
    seed: u64,
    params: RmatParams,
    graph: Graph,
    metrics: GraphMetrics,
}

fn make_candidate(spec: &DatasetSpec, attempt: usize) -> Result<Candidate> {
    let seed = candidate_seed(spec.seed, attempt);
    let params = sample_params(&spec.distribution, seed)?;
    let graph = generate_rmat(&params, seed)?;
    let metrics = compute_metrics(
        &graph,
        ClusteringMode::Approx {
            trials: spec.trials,
            seed: seed::derive(seed, &[b"clustering"]),
        },
    )?;
    Ok(Candidate {
        seed,
        params,
        graph,
        metrics,
    })
}

/// Builds a dataset, handing each accepted graph to `sink` in acceptance order.
///
/// Candidates are generated in parallel batches but accepted strictly in
/// attempt order, so the result depends only on `spec`, never on the worker
/// count. Degenerate candidates are skipped. When the attempt budget runs out
/// the partial manifest is returned with `shortfall` set.
pub fn build_dataset<F>(spec: &DatasetSpec, mut sink: F) -> Result<DatasetManifest>
where
    F: FnMut(&ManifestEntry, &Graph) -> Result<()>,
{
    if spec.count == 0 {
        return Err(Error::InvalidParams("count must be positive".into()));
    }
    spec.distribution.validate()?;
    spec.grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;

    let budget = spec.count * spec.attempt_factor;
    let quota = spec.grid.quota(spec.count);
    let mut occupancy = vec![0usize; spec.grid.bin_count()];
    let mut entries = Vec::with_capacity(spec.count);
    let batch = spec.workers.max(1) * 4;
    let mut attempts = 0;

    'outer: while attempts < budget && entries.len() < spec.count {
        let end = (attempts + batch).min(budget);
        let results: Vec<Result<Candidate>> =
            pool.install(|| (attempts..end).into_par_iter().map(|a| make_candidate(spec, a)).collect());
        for result in results {
            attempts += 1;
            let cand = match result {
                Ok(c) => c,
                Err(Error::DegenerateParams { .. }) | Err(Error::EmptyGraph) => continue,
                Err(e) => return Err(e),
            };
            let bin = spec.grid.bin(cand.metrics.edge_count, cand.metrics.mean_clustering);
            if spec.balance && occupancy[bin] >= quota {
                continue;
            }
            occupancy[bin] += 1;
            let graph_id = format!("g{:05}", entries.len());
            let entry = ManifestEntry {
                file: graph_file(&graph_id),
                graph_id,
                seed: cand.seed,
                params: cand.params,
                metrics: Some(cand.metrics),
            };
            sink(&entry, &cand.graph)?;
            entries.push(entry);
            if entries.len() == spec.count {
                break 'outer;
            }
        }
    }

    let shortfall = (entries.len() < spec.count).then(|| Shortfall {
        missing: spec.count - entries.len(),
        unfilled: if spec.balance {
            occupancy
                .iter()
                .enumerate()
                .filter(|(_, &have)| have < quota)
                .map(|(b, &have)| UnfilledBin {
                    edge_bin: b / spec.grid.clustering_bins,
                    clustering_bin: b % spec.grid.clustering_bins,
                    have,
                    quota,
                })
                .collect()
        } else {
            Vec::new()
        },
    });
    let (log_edge_bin_edges, clustering_bin_edges) = spec.grid.bin_edges();
    Ok(DatasetManifest {
        version: MANIFEST_VERSION,
        seed: spec.seed,
        requested: spec.count,
        balanced: spec.balance,
        attempts,
        distribution: spec.distribution,
        grid: spec.grid,
        log_edge_bin_edges,
        clustering_bin_edges,
        entries,
        shortfall,
    })
}

/// Balanced-or-naive dataset without keeping the graphs.
pub fn build_balanced_dataset(spec: &DatasetSpec) -> Result<DatasetManifest> {
    build_dataset(spec, |_, _| Ok(()))
}

/// Regenerates the graph for a manifest entry from its recorded seed and params.
pub fn regenerate(entry: &ManifestEntry) -> Result<Graph> {
    generate_rmat(&entry.params, entry.seed)
}
