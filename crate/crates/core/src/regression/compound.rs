use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ridge::{fit_ridge, impact_factors, RidgeModel};
use super::standardize::{fit_standardizer, Standardizer};
use super::svr::{fit_rbf_residual, RbfResidualModel, SvrHyper};
use crate::error::{Error, Result};
use crate::measurement::{GnnModelKind, Representation};
use crate::metrics::GraphMetrics;

pub const MODEL_VERSION: u32 = 1;
pub const MIN_TRAINING_ROWS: usize = 5;

/// Which metrics feed the regression, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    /// `[n, m, max_degree, mean_degree]`
    #[default]
    Base,
    /// `Base` plus mean clustering.
    WithClustering,
}

impl FeatureSet {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            FeatureSet::Base => &["n", "m", "max_degree", "mean_degree"],
            FeatureSet::WithClustering => &["n", "m", "max_degree", "mean_degree", "clustering"],
        }
    }

    pub fn extract(self, m: &GraphMetrics) -> Vec<f64> {
        let mut v = vec![
            m.node_count as f64,
            m.edge_count as f64,
            m.max_degree as f64,
            m.mean_degree,
        ];
        if self == FeatureSet::WithClustering {
            v.push(m.mean_clustering);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    Milliseconds,
    LogMilliseconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionConfig {
    pub lambda: f64,
    pub features: FeatureSet,
    pub target: Target,
    pub svr: SvrHyper,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            lambda: 1e-3,
            features: FeatureSet::Base,
            target: Target::Milliseconds,
            svr: SvrHyper::default(),
        }
    }
}

/// Standardizer, ridge and RBF residual layer for one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundModel {
    pub version: u32,
    pub model: GnnModelKind,
    pub repr: Representation,
    pub units: String,
    pub features: FeatureSet,
    pub target: Target,
    pub standardizer: Standardizer,
    pub ridge: RidgeModel,
    pub residual: RbfResidualModel,
}

pub fn fit_compound(
    model: GnnModelKind,
    repr: Representation,
    metrics: &[GraphMetrics],
    times_ms: &[f64],
    cfg: &RegressionConfig,
) -> Result<CompoundModel> {
    if metrics.len() != times_ms.len() {
        return Err(Error::LengthMismatch {
            left: metrics.len(),
            right: times_ms.len(),
        });
    }
    if metrics.len() < MIN_TRAINING_ROWS {
        return Err(Error::InsufficientData(format!(
            "{model}/{repr}: {} training rows, need at least {MIN_TRAINING_ROWS}",
            metrics.len()
        )));
    }
    if times_ms.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParams("training times must be positive and finite".into()));
    }
    let raw: Vec<Vec<f64>> = metrics.iter().map(|m| cfg.features.extract(m)).collect();
    let standardizer = fit_standardizer(&raw)?;
    let x = standardizer.transform_all(&raw);
    let y: Vec<f64> = match cfg.target {
        Target::Milliseconds => times_ms.to_vec(),
        Target::LogMilliseconds => times_ms.iter().map(|t| t.ln()).collect(),
    };
    let ridge = fit_ridge(&x, &y, cfg.lambda)?;
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(r, v)| v - ridge.predict(r)).collect();
    let residual = fit_rbf_residual(&x, &residuals, &cfg.svr)?;
    Ok(CompoundModel {
        version: MODEL_VERSION,
        model,
        repr,
        units: "ms".into(),
        features: cfg.features,
        target: cfg.target,
        standardizer,
        ridge,
        residual,
    })
}

impl CompoundModel {
    fn finish(&self, value: f64) -> f64 {
        let ms = match self.target {
            Target::Milliseconds => value,
            Target::LogMilliseconds => value.exp(),
        };
        if ms.is_nan() {
            0.0
        } else {
            ms.max(0.0)
        }
    }

    /// Predicted per-epoch time in ms, never NaN and never negative.
    pub fn predict(&self, met: &GraphMetrics) -> f64 {
        let z = self.standardizer.transform(&self.features.extract(met));
        self.finish(self.ridge.predict(&z) + self.residual.predict(&z))
    }

    /// Prediction of the ridge layer alone.
    pub fn predict_linear(&self, met: &GraphMetrics) -> f64 {
        let z = self.standardizer.transform(&self.features.extract(met));
        self.finish(self.ridge.predict(&z))
    }

    /// Ridge coefficients mapped back to raw feature units.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        self.ridge
            .coefficients
            .iter()
            .zip(&self.standardizer.scales)
            .map(|(b, s)| b / s)
            .collect()
    }

    /// Feature std times raw coefficient, i.e. the standardized coefficient
    /// magnitude; 0 for features that were constant in training.
    pub fn impact_factors(&self) -> Vec<f64> {
        impact_factors(&self.raw_coefficients(), &self.standardizer.raw_stds)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: CompoundModel = serde_json::from_str(text)?;
        if m.version != MODEL_VERSION {
            return Err(Error::Version {
                found: m.version,
                expected: MODEL_VERSION,
            });
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json(&fs::read_to_string(path)?)
    }
}
