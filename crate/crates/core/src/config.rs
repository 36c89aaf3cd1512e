//! Pipeline configuration, read from a TOML file.
//!
//! Only `seed` is required; everything else has a default.
//!
//! ```toml
//! seed = 7
//! output_dir = "run"
//! models = ["GCN", "SAGE"]
//!
//! [dataset]
//! count = 200
//! balance = true
//!
//! [dataset.distribution]
//! edge_range = [1000.0, 100000.0]
//!
//! [oracle]
//! sigma = 0.03
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{BalanceGrid, DatasetSpec, ATTEMPT_FACTOR};
use crate::error::{Error, Result};
use crate::measurement::{GnnModelKind, OracleParams};
use crate::metrics::DEFAULT_TRIALS;
use crate::regression::RegressionConfig;
use crate::rmat::ParamDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSettings {
    pub count: usize,
    pub balance: bool,
    pub attempt_factor: usize,
    pub distribution: ParamDistribution,
    pub grid: BalanceGrid,
}

impl Default for DatasetSettings {
    fn default() -> Self {
        DatasetSettings {
            count: 1000,
            balance: true,
            attempt_factor: ATTEMPT_FACTOR,
            distribution: ParamDistribution::default(),
            grid: BalanceGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringSettings {
    /// Exact clustering instead of wedge sampling in the metrics stage.
    pub exact: bool,
    pub trials: usize,
}

impl Default for ClusteringSettings {
    fn default() -> Self {
        ClusteringSettings {
            exact: false,
            trials: DEFAULT_TRIALS,
        }
    }
}

fn all_models() -> Vec<GnnModelKind> {
    GnnModelKind::ALL.to_vec()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default = "all_models")]
    pub models: Vec<GnnModelKind>,
    /// External timing CSV; when absent `measure` uses the oracle.
    #[serde(default)]
    pub timings: Option<PathBuf>,
    #[serde(default)]
    pub dataset: DatasetSettings,
    #[serde(default)]
    pub clustering: ClusteringSettings,
    #[serde(default)]
    pub oracle: OracleParams,
    #[serde(default)]
    pub regression: RegressionConfig,
}

impl PipelineConfig {
    pub fn with_seed(seed: u64) -> Self {
        PipelineConfig {
            seed,
            output_dir: default_output(),
            workers: 1,
            models: all_models(),
            timings: None,
            dataset: DatasetSettings::default(),
            clustering: ClusteringSettings::default(),
            oracle: OracleParams::default(),
            regression: RegressionConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidParams("at least one model kind is required".into()));
        }
        if self.clustering.trials == 0 {
            return Err(Error::InvalidParams("clustering.trials must be >= 1".into()));
        }
        self.dataset.distribution.validate()?;
        self.dataset.grid.validate()?;
        self.oracle.validate()
    }

    pub fn dataset_spec(&self) -> DatasetSpec {
        DatasetSpec {
            count: self.dataset.count,
            distribution: self.dataset.distribution,
            grid: self.dataset.grid,
            seed: self.seed,
            balance: self.dataset.balance,
            attempt_factor: self.dataset.attempt_factor,
            trials: self.clustering.trials,
            workers: self.workers,
        }
    }
}
