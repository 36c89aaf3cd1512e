use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot below which the normal equations count as singular.
const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl RidgeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }
}

/// Minimizes `||y - X b - b0||^2 + lambda ||b||^2` with an unpenalized
/// intercept, by Cholesky on the centered normal equations.
pub fn fit_ridge(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<RidgeModel> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!("lambda must be >= 0, got {lambda}")));
    }
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    if n == 0 || n < d {
        return Err(Error::InsufficientData(format!(
            "ridge needs at least as many rows as features ({n} < {d})"
        )));
    }
    let x_mean: Vec<f64> = (0..d)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let xc = DMatrix::from_fn(n, d, |i, j| x[i][j] - x_mean[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let mut gram = xc.transpose() * &xc;
    for j in 0..d {
        gram[(j, j)] += lambda;
    }
    let rhs = xc.transpose() * yc;

    let scale = (0..d).map(|j| gram[(j, j)]).fold(0.0, f64::max);
    let chol = gram.cholesky().ok_or(Error::SingularMatrix)?;
    let l = chol.l_dirty();
    if (0..d).any(|j| l[(j, j)].powi(2) <= SINGULAR_RTOL * scale) {
        return Err(Error::SingularMatrix);
    }
    let beta = chol.solve(&rhs);
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let intercept = y_mean - coefficients.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();
    Ok(RidgeModel {
        coefficients,
        intercept,
        lambda,
    })
}

/// `|coefficient| * std` per feature, with both in raw feature units.
pub fn impact_factors(raw_coefficients: &[f64], raw_stds: &[f64]) -> Vec<f64> {
    raw_coefficients
        .iter()
        .zip(raw_stds)
        .map(|(c, s)| (c * s).abs())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_recovery_without_penalty() {
        let x: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let t = i as f64;
                vec![t.sin(), (0.3 * t).cos(), t * 0.1, (t * 0.7).sin() * 2.0]
            })
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0]).collect();
        let m = fit_ridge(&x, &y, 0.0).unwrap();
        for (c, want) in m.coefficients.iter().zip([2.0, 0.0, 0.0, 0.0]) {
            assert!((c - want).abs() < 1e-6, "{:?}", m.coefficients);
        }
        assert!(m.intercept.abs() < 1e-6);
    }

    #[test]
    fn two_point_hand_solution() {
        // beta = sum(xy) / (sum(x^2) + lambda) = 2 / 4, intercept = mean(y).
        let m = fit_ridge(&[vec![-1.0], vec![1.0]], &[0.0, 2.0], 2.0).unwrap();
        assert!((m.coefficients[0] - 0.5).abs() < 1e-15);
        assert!((m.intercept - 1.0).abs() < 1e-15);
    }

    #[test]
    fn huge_penalty_shrinks_to_mean() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 * i as f64 + 1.0).collect();
        let m = fit_ridge(&x, &y, 1e12).unwrap();
        assert!(m.coefficients.iter().all(|c| c.abs() < 1e-8));
        assert!((m.intercept - 14.5).abs() < 1e-6);
    }

    #[test]
    fn collinear_features_are_singular_without_penalty() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(fit_ridge(&x, &y, 0.0), Err(Error::SingularMatrix)));
        assert!(fit_ridge(&x, &y, 1e-3).is_ok());
    }

    #[test]
    fn constant_feature_is_singular_without_penalty() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 0.0]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(fit_ridge(&x, &y, 0.0), Err(Error::SingularMatrix)));
        let m = fit_ridge(&x, &y, 1e-3).unwrap();
        assert_eq!(m.coefficients[1], 0.0);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            fit_ridge(&[vec![1.0]], &[1.0, 2.0], 0.0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            fit_ridge(&[vec![1.0, 2.0]], &[1.0], 0.0),
            Err(Error::InsufficientData(_))
        ));
        assert!(fit_ridge(&[vec![1.0], vec![2.0]], &[1.0, 2.0], -1.0).is_err());
    }

    #[test]
    fn impact_is_coefficient_times_std() {
        assert_eq!(impact_factors(&[2.0, -1.5], &[3.0, 2.0]), vec![6.0, 3.0]);
        assert_eq!(impact_factors(&[4.0], &[0.0]), vec![0.0]);
    }
}
