//! Per-graph representation choice from predicted times, and the accounting
//! of how much time that choice saves against fixed or random strategies.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{GnnModelKind, Representation, TimingRecord};

/// Faster predicted representation; an exact tie goes to `Sparse`.
pub fn choose_repr(pred_sparse: f64, pred_edge: f64) -> Representation {
    if pred_edge < pred_sparse {
        Representation::EdgeList
    } else {
        Representation::Sparse
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub graph_id: String,
    pub model: GnnModelKind,
    pub predicted_sparse_ms: f64,
    pub predicted_edge_list_ms: f64,
    pub chosen: Representation,
}

impl Decision {
    pub fn new(graph_id: impl Into<String>, model: GnnModelKind, pred_sparse: f64, pred_edge: f64) -> Self {
        Decision {
            graph_id: graph_id.into(),
            model,
            predicted_sparse_ms: pred_sparse,
            predicted_edge_list_ms: pred_edge,
            chosen: choose_repr(pred_sparse, pred_edge),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphOutcome {
    pub graph_id: String,
    pub chosen: Representation,
    pub predicted_sparse_ms: f64,
    pub predicted_edge_list_ms: f64,
    pub actual_sparse_ms: f64,
    pub actual_edge_list_ms: f64,
    pub correct: bool,
}

impl GraphOutcome {
    fn chosen_ms(&self) -> f64 {
        match self.chosen {
            Representation::Sparse => self.actual_sparse_ms,
            Representation::EdgeList => self.actual_edge_list_ms,
        }
    }

    fn best_ms(&self) -> f64 {
        self.actual_sparse_ms.min(self.actual_edge_list_ms)
    }

    fn worst_ms(&self) -> f64 {
        self.actual_sparse_ms.max(self.actual_edge_list_ms)
    }
}

/// Corpus-total time per strategy, in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyTotals {
    pub always_edge_list: f64,
    pub always_sparse: f64,
    pub regression: f64,
    pub best: f64,
    /// Expected total of a fair coin per graph.
    pub random: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub model: GnnModelKind,
    pub graphs: usize,
    pub accuracy: f64,
    pub speedup_vs_random: f64,
    pub speedup_vs_worst: f64,
    /// Best-possible total over achieved total, at most 1.
    pub regret_vs_best: f64,
    /// Mean over graphs of the per-graph random/chosen ratio.
    pub mean_graph_speedup_vs_random: f64,
    pub totals: StrategyTotals,
    /// `(t_chosen - t_best) / t_best` for each misclassified graph.
    pub misclassified_relative_losses: Vec<f64>,
    pub misclassified_median_relative_loss: Option<f64>,
    /// `(t_worst - t_best) / t_best` median over correctly classified graphs.
    pub correct_median_relative_gap: Option<f64>,
    pub decisions: Vec<GraphOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub models: Vec<ModelSelection>,
}

impl SelectionReport {
    pub fn get(&self, model: GnnModelKind) -> Option<&ModelSelection> {
        self.models.iter().find(|m| m.model == model)
    }
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    })
}

fn summarize(model: GnnModelKind, decisions: Vec<GraphOutcome>) -> ModelSelection {
    let n = decisions.len() as f64;
    let sum = |f: &dyn Fn(&GraphOutcome) -> f64| decisions.iter().map(f).sum::<f64>();
    let totals = StrategyTotals {
        always_edge_list: sum(&|d| d.actual_edge_list_ms),
        always_sparse: sum(&|d| d.actual_sparse_ms),
        regression: sum(&|d| d.chosen_ms()),
        best: sum(&|d| d.best_ms()),
        random: sum(&|d| (d.actual_sparse_ms + d.actual_edge_list_ms) / 2.0),
    };
    let worst = sum(&|d| d.worst_ms());
    let losses: Vec<f64> = decisions
        .iter()
        .filter(|d| !d.correct)
        .map(|d| (d.chosen_ms() - d.best_ms()) / d.best_ms())
        .collect();
    let gaps: Vec<f64> = decisions
        .iter()
        .filter(|d| d.correct)
        .map(|d| (d.worst_ms() - d.best_ms()) / d.best_ms())
        .collect();
    ModelSelection {
        model,
        graphs: decisions.len(),
        accuracy: decisions.iter().filter(|d| d.correct).count() as f64 / n,
        speedup_vs_random: totals.random / totals.regression,
        speedup_vs_worst: worst / totals.regression,
        regret_vs_best: totals.best / totals.regression,
        mean_graph_speedup_vs_random: sum(&|d| (d.actual_sparse_ms + d.actual_edge_list_ms) / 2.0 / d.chosen_ms())
            / n,
        totals,
        misclassified_median_relative_loss: median(&losses),
        misclassified_relative_losses: losses,
        correct_median_relative_gap: median(&gaps),
        decisions,
    }
}

/// Scores decisions against actual timings, grouped by model kind.
///
/// A decision is correct when the chosen representation is no slower than
/// the other one; actual ties count as correct.
pub fn evaluate_selection(timings: &[TimingRecord], decisions: &[Decision]) -> Result<SelectionReport> {
    let actual: HashMap<(&str, GnnModelKind, Representation), f64> = timings
        .iter()
        .map(|t| ((t.graph_id.as_str(), t.model, t.repr), t.epoch_time_ms))
        .collect();
    let mut grouped: BTreeMap<GnnModelKind, Vec<GraphOutcome>> = BTreeMap::new();
    for d in decisions {
        let get = |r| actual.get(&(d.graph_id.as_str(), d.model, r)).copied();
        let (Some(sparse), Some(edge)) = (get(Representation::Sparse), get(Representation::EdgeList)) else {
            return Err(Error::IncompletePair {
                graph_id: d.graph_id.clone(),
                model: d.model.to_string(),
            });
        };
        let chosen_ms = match d.chosen {
            Representation::Sparse => sparse,
            Representation::EdgeList => edge,
        };
        grouped.entry(d.model).or_default().push(GraphOutcome {
            graph_id: d.graph_id.clone(),
            chosen: d.chosen,
            predicted_sparse_ms: d.predicted_sparse_ms,
            predicted_edge_list_ms: d.predicted_edge_list_ms,
            actual_sparse_ms: sparse,
            actual_edge_list_ms: edge,
            correct: chosen_ms <= sparse.min(edge),
        });
    }
    Ok(SelectionReport {
        models: grouped.into_iter().map(|(m, d)| summarize(m, d)).collect(),
    })
}

/// Actual sparse vs edge-list time per graph, colored by the predicted choice.
pub fn write_scatter_csv<W: Write>(out: W, sel: &ModelSelection) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["graph_id", "actual_sparse_ms", "actual_edge_list_ms", "predicted_repr", "correct"])?;
    for d in &sel.decisions {
        w.write_record([
            d.graph_id.as_str(),
            &format!("{:.6}", d.actual_sparse_ms),
            &format!("{:.6}", d.actual_edge_list_ms),
            d.chosen.name(),
            if d.correct { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean per-graph time of each strategy, one row per model kind.
pub fn write_strategy_csv<W: Write>(out: W, report: &SelectionReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "time_edge", "time_sparse", "time_regression", "time_best"])?;
    for m in &report.models {
        let n = m.graphs as f64;
        let t = &m.totals;
        w.write_record([
            m.model.name().to_string(),
            format!("{:.6}", t.always_edge_list / n),
            format!("{:.6}", t.always_sparse / n),
            format!("{:.6}", t.regression / n),
            format!("{:.6}", t.best / n),
        ])?;
    }
    w.flush()?;
    Ok(())
}
