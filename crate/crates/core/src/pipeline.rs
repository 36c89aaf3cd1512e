//! File-level stages of the pipeline, shared by the CLI and the C ABI.
//!
//! Every stage reads its inputs from and writes its outputs to an output
//! directory with a fixed layout (see [`Layout`]). Outputs are written to a
//! temporary file and renamed into place.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::dataset::{build_dataset, DatasetManifest};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, write_edge_list};
use crate::measurement::{ingest_timings, measure_manifest, write_timings, GnnModelKind, Representation, TimingRecord};
use crate::metrics::{compute_metrics, read_metrics_csv, write_metrics_csv, ClusteringMode, GraphMetrics, MetricsRow};
use crate::regression::{fit_compound, score, CompoundModel, RegressionConfig, Scores};
use crate::selector::{evaluate_selection, write_scatter_csv, write_strategy_csv, Decision, SelectionReport};
use crate::seed;

pub const REPORT_VERSION: u32 = 1;

/// Artifact paths under an output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn metrics(&self) -> PathBuf {
        self.root.join("metrics.csv")
    }

    pub fn timings(&self) -> PathBuf {
        self.root.join("timings.csv")
    }

    pub fn models_dir(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn model_file(&self, model: GnnModelKind, repr: Representation) -> PathBuf {
        self.models_dir().join(format!(
            "{}_{}.json",
            model.name().to_ascii_lowercase(),
            repr.name().to_ascii_lowercase()
        ))
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }

    pub fn scatter(&self, model: GnnModelKind) -> PathBuf {
        self.root.join(format!("scatter_{}.csv", model.name().to_ascii_lowercase()))
    }

    pub fn strategies(&self) -> PathBuf {
        self.root.join("strategy_totals.csv")
    }
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingFile(path.to_path_buf()))
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))
}

/// Generates the corpus: one edge-list file per graph plus `manifest.json`.
///
/// The manifest is written even when the attempt budget runs short; callers
/// should check `shortfall`.
pub fn generate(cfg: &PipelineConfig) -> Result<DatasetManifest> {
    let layout = Layout::new(&cfg.output_dir);
    fs::create_dir_all(layout.root.join("graphs"))?;
    let manifest = build_dataset(&cfg.dataset_spec(), |entry, graph| {
        write_atomic(&layout.root.join(&entry.file), write_edge_list(graph).as_bytes())
    })?;
    write_atomic(&layout.manifest(), manifest.to_json()?.as_bytes())?;
    Ok(manifest)
}

/// Clustering mode used by the metrics stage for one graph.
pub fn clustering_mode_for(cfg: &PipelineConfig, graph_id: &str) -> ClusteringMode {
    if cfg.clustering.exact {
        ClusteringMode::Exact
    } else {
        ClusteringMode::Approx {
            trials: cfg.clustering.trials,
            seed: seed::derive(cfg.seed, &[b"metrics", graph_id.as_bytes()]),
        }
    }
}

/// Computes metrics for every manifest entry from its graph file.
pub fn metrics(cfg: &PipelineConfig, manifest_path: &Path) -> Result<Vec<MetricsRow>> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let rows = pool(cfg.workers)?.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|e| {
                let path = dir.join(&e.file);
                require(&path)?;
                let g = parse_edge_list(&fs::read_to_string(&path)?)?;
                Ok(MetricsRow {
                    graph_id: e.graph_id.clone(),
                    metrics: compute_metrics(&g, clustering_mode_for(cfg, &e.graph_id))?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut buf = Vec::new();
    write_metrics_csv(&mut buf, &rows)?;
    write_atomic(&Layout::new(&cfg.output_dir).metrics(), &buf)?;
    Ok(rows)
}

pub fn load_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    require(path)?;
    read_metrics_csv(fs::File::open(path)?)
}

pub fn load_timings(path: &Path) -> Result<Vec<TimingRecord>> {
    require(path)?;
    ingest_timings(fs::File::open(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimingSource {
    Oracle,
    Csv(PathBuf),
}

/// Produces `timings.csv` from the oracle or from an external timing CSV.
///
/// Oracle timings use `metrics.csv` from the output directory when present.
pub fn measure(cfg: &PipelineConfig, manifest_path: &Path, source: &TimingSource) -> Result<Vec<TimingRecord>> {
    let layout = Layout::new(&cfg.output_dir);
    let records = match source {
        TimingSource::Csv(path) => load_timings(path)?,
        TimingSource::Oracle => {
            let manifest = DatasetManifest::load(manifest_path)?;
            let known: HashMap<String, GraphMetrics> = if layout.metrics().exists() {
                load_metrics(&layout.metrics())?
                    .into_iter()
                    .map(|r| (r.graph_id, r.metrics))
                    .collect()
            } else {
                HashMap::new()
            };
            let dir = manifest_path.parent().unwrap_or(Path::new("."));
            measure_manifest(&manifest, dir, &known, &cfg.models, &cfg.oracle, cfg.seed)?
        }
    };
    let mut buf = Vec::new();
    write_timings(&mut buf, &records)?;
    write_atomic(&layout.timings(), &buf)?;
    Ok(records)
}

/// Training pairs for one design: metrics rows joined with timings on graph id.
pub fn training_set(
    metrics: &[MetricsRow],
    timings: &[TimingRecord],
    model: GnnModelKind,
    repr: Representation,
) -> (Vec<GraphMetrics>, Vec<f64>) {
    let times: HashMap<&str, f64> = timings
        .iter()
        .filter(|t| t.model == model && t.repr == repr)
        .map(|t| (t.graph_id.as_str(), t.epoch_time_ms))
        .collect();
    metrics
        .iter()
        .filter_map(|r| times.get(r.graph_id.as_str()).map(|&t| (r.metrics.clone(), t)))
        .unzip()
}

/// Fits one compound model per requested design.
pub fn fit_designs(
    metrics: &[MetricsRow],
    timings: &[TimingRecord],
    designs: &[(GnnModelKind, Representation)],
    cfg: &RegressionConfig,
    workers: usize,
) -> Result<Vec<CompoundModel>> {
    pool(workers)?.install(|| {
        designs
            .par_iter()
            .map(|&(model, repr)| {
                let (x, y) = training_set(metrics, timings, model, repr);
                fit_compound(model, repr, &x, &y, cfg)
            })
            .collect()
    })
}

pub fn designs_for(
    models: &[GnnModelKind],
    model: Option<GnnModelKind>,
    repr: Option<Representation>,
) -> Vec<(GnnModelKind, Representation)> {
    let models: Vec<_> = match model {
        Some(m) => vec![m],
        None => models.to_vec(),
    };
    let reprs: Vec<_> = match repr {
        Some(r) => vec![r],
        None => Representation::ALL.to_vec(),
    };
    models
        .into_iter()
        .flat_map(|m| reprs.iter().map(move |&r| (m, r)))
        .collect()
}

/// Fits the selected designs and writes one model JSON each.
pub fn fit(
    cfg: &PipelineConfig,
    metrics_path: &Path,
    timings_path: &Path,
    model: Option<GnnModelKind>,
    repr: Option<Representation>,
) -> Result<Vec<CompoundModel>> {
    let metrics = load_metrics(metrics_path)?;
    let timings = load_timings(timings_path)?;
    let designs = designs_for(&cfg.models, model, repr);
    let models = fit_designs(&metrics, &timings, &designs, &cfg.regression, cfg.workers)?;
    let layout = Layout::new(&cfg.output_dir);
    for m in &models {
        write_atomic(&layout.model_file(m.model, m.repr), m.to_json()?.as_bytes())?;
    }
    Ok(models)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignScores {
    pub model: GnnModelKind,
    pub repr: Representation,
    pub samples: usize,
    pub scores: Scores,
    pub impact_factors: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub version: u32,
    pub regression: Vec<DesignScores>,
    pub selection: SelectionReport,
}

/// Regression scores per design and selection quality per model kind.
///
/// Every model kind present in `models` must have both representations.
pub fn evaluate_models(
    models: &[CompoundModel],
    metrics: &[MetricsRow],
    timings: &[TimingRecord],
) -> Result<EvaluationReport> {
    let mut regression = Vec::new();
    for cm in models {
        let (x, y) = training_set(metrics, timings, cm.model, cm.repr);
        let pred: Vec<f64> = x.iter().map(|m| cm.predict(m)).collect();
        regression.push(DesignScores {
            model: cm.model,
            repr: cm.repr,
            samples: y.len(),
            scores: score(&y, &pred)?,
            impact_factors: cm
                .features
                .names()
                .iter()
                .map(|s| s.to_string())
                .zip(cm.impact_factors())
                .collect(),
        });
    }

    let by_design: HashMap<(GnnModelKind, Representation), &CompoundModel> =
        models.iter().map(|m| ((m.model, m.repr), m)).collect();
    let mut kinds: Vec<GnnModelKind> = models.iter().map(|m| m.model).collect();
    kinds.sort();
    kinds.dedup();
    let mut decisions = Vec::new();
    for kind in kinds {
        let get = |r| {
            by_design.get(&(kind, r)).ok_or_else(|| {
                Error::InsufficientData(format!("no {r} model for {kind}; both representations are needed"))
            })
        };
        let (sparse, edge) = (get(Representation::Sparse)?, get(Representation::EdgeList)?);
        let timed: std::collections::HashSet<&str> = timings
            .iter()
            .filter(|t| t.model == kind)
            .map(|t| t.graph_id.as_str())
            .collect();
        for row in metrics.iter().filter(|r| timed.contains(r.graph_id.as_str())) {
            decisions.push(Decision::new(
                row.graph_id.clone(),
                kind,
                sparse.predict(&row.metrics),
                edge.predict(&row.metrics),
            ));
        }
    }
    Ok(EvaluationReport {
        version: REPORT_VERSION,
        regression,
        selection: evaluate_selection(timings, &decisions)?,
    })
}

/// Loads the configured models, evaluates them and writes the report files.
pub fn evaluate(
    cfg: &PipelineConfig,
    models_dir: &Path,
    metrics_path: &Path,
    timings_path: &Path,
) -> Result<EvaluationReport> {
    let mut models = Vec::new();
    let lookup = Layout::new(models_dir.parent().unwrap_or(Path::new(".")));
    for &kind in &cfg.models {
        for repr in Representation::ALL {
            let file = models_dir.join(lookup.model_file(kind, repr).file_name().unwrap());
            models.push(CompoundModel::load(&file)?);
        }
    }
    let metrics = load_metrics(metrics_path)?;
    let timings = load_timings(timings_path)?;
    let report = evaluate_models(&models, &metrics, &timings)?;

    let layout = Layout::new(&cfg.output_dir);
    write_atomic(&layout.report(), (serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
    for sel in &report.selection.models {
        let mut buf = Vec::new();
        write_scatter_csv(&mut buf, sel)?;
        write_atomic(&layout.scatter(sel.model), &buf)?;
    }
    let mut buf = Vec::new();
    write_strategy_csv(&mut buf, &report.selection)?;
    write_atomic(&layout.strategies(), &buf)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub model: GnnModelKind,
    pub repr: Representation,
    pub epoch_time_ms: f64,
}

/// Predicted times for one graph under each given model file.
pub fn predict(model_paths: &[PathBuf], met: &GraphMetrics) -> Result<Vec<Prediction>> {
    model_paths
        .iter()
        .map(|p| {
            let cm = CompoundModel::load(p)?;
            Ok(Prediction {
                model: cm.model,
                repr: cm.repr,
                epoch_time_ms: cm.predict(met),
            })
        })
        .collect()
}
