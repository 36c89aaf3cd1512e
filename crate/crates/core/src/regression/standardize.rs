use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column affine scaling to zero mean and unit population std.
///
/// Columns with zero variance keep a scale of 1, so they standardize to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Population std as measured, 0 for constant columns.
    pub raw_stds: Vec<f64>,
}

pub fn fit_standardizer(rows: &[Vec<f64>]) -> Result<Standardizer> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standardizer needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let d = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::LengthMismatch {
            left: d,
            right: bad.len(),
        });
    }
    let n = rows.len() as f64;
    let mut means = vec![0.0; d];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut raw_stds = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            raw_stds[j] += (r[j] - means[j]).powi(2);
        }
    }
    raw_stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
    let scales = raw_stds
        .iter()
        .map(|&s| if s > 0.0 && s.is_finite() { s } else { 1.0 })
        .collect();
    Ok(Standardizer {
        means,
        scales,
        raw_stds,
    })
}

impl Standardizer {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn inverse(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(z, (m, s))| z * s + m)
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}
