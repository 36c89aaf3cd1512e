//! Predict per-epoch GNN training time from cheap graph metrics and use the
//! predictions to pick between sparse-matrix and edge-list aggregation.
//!
//! The pipeline runs in five stages: generate a balanced RMAT corpus
//! ([`dataset`]), characterize each graph ([`metrics`]), collect timings
//! ([`measurement`]), fit one compound regressor per design ([`regression`]),
//! and score the resulting choices ([`selector`]). [`pipeline`] wires the
//! stages to files for the command-line tool.

pub mod config;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod measurement;
pub mod metrics;
pub mod pipeline;
pub mod regression;
pub mod rmat;
pub mod selector;
mod seed;

pub use error::{Error, Result};
pub use graph::{largest_component, parse_edge_list, write_edge_list, Graph};
pub use measurement::{GnnModelKind, Representation, TimingRecord};
pub use metrics::{compute_metrics, ClusteringMode, GraphMetrics};
