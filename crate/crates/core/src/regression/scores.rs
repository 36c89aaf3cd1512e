use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub r2: f64,
    pub mse: f64,
    pub mape: f64,
}

/// R^2 = 1 - SSres / SStot, MSE, and MAPE as a fraction (not percent).
///
/// A constant target scores R^2 = 1 when predicted exactly and 0 otherwise.
pub fn score(y_true: &[f64], y_pred: &[f64]) -> Result<Scores> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InsufficientData("cannot score zero samples".into()));
    }
    if y_true.iter().any(|&y| y == 0.0) {
        return Err(Error::MapeUndefined);
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    let mape = y_true.iter().zip(y_pred).map(|(y, p)| ((p - y) / y).abs()).sum::<f64>() / n;
    Ok(Scores {
        r2,
        mse: ss_res / n,
        mape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let y = [1.0, 4.0, 2.5];
        assert_eq!(score(&y, &y).unwrap(), Scores { r2: 1.0, mse: 0.0, mape: 0.0 });
    }

    #[test]
    fn hand_computed_errors() {
        let s = score(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((s.mse - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.mape - 4.0 / 9.0).abs() < 1e-15);
        // Constant prediction at the mean.
        assert_eq!(s.r2, 0.0);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(score(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(score(&[0.0, 1.0], &[0.0, 1.0]), Err(Error::MapeUndefined)));
        assert!(score(&[], &[]).is_err());
    }
}
