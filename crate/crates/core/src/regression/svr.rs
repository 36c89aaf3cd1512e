//! RBF-kernel regressors for the ridge residuals.
//!
//! The default solver is epsilon-insensitive support vector regression,
//! solved in the dual by sequential minimal optimization with second-order
//! working-set selection. The dual is posed over `2n` variables
//! `(alpha, alpha*)` with labels `+1` / `-1`; the prediction weight of a
//! training point is `alpha_i - alpha*_i`, bounded by `C` in magnitude.
//!
//! A closed-form kernel ridge solver is available as a fallback. Both produce
//! the same model shape: `f(x) = sum_i w_i exp(-gamma |x - x_i|^2) + bias`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualSolver {
    #[default]
    Smo,
    KernelRidge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrHyper {
    /// Box constraint on each dual weight.
    pub c: f64,
    /// Tube half-width; `None` means `0.1 * std(residuals)`.
    pub epsilon: Option<f64>,
    /// Kernel width; `None` means `1 / (d * mean column variance)`.
    pub gamma: Option<f64>,
    /// Stop when the maximal KKT violation drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub solver: ResidualSolver,
}

impl Default for SvrHyper {
    fn default() -> Self {
        SvrHyper {
            c: 10.0,
            epsilon: None,
            gamma: None,
            tol: 1e-3,
            max_iter: 1_000_000,
            solver: ResidualSolver::Smo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfResidualModel {
    pub support: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub c: f64,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl RbfResidualModel {
    pub fn zero(gamma: f64) -> Self {
        RbfResidualModel {
            support: Vec::new(),
            weights: Vec::new(),
            bias: 0.0,
            gamma,
            epsilon: 0.0,
            c: 0.0,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.bias
            + self
                .support
                .iter()
                .zip(&self.weights)
                .map(|(s, w)| w * rbf(self.gamma, s, x))
                .sum::<f64>()
    }
}

fn population_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// The "scale" heuristic: `1 / (d * mean column variance)`.
pub fn scale_gamma(x: &[Vec<f64>]) -> f64 {
    let d = x.first().map_or(1, Vec::len).max(1);
    let mean_var = (0..d)
        .map(|j| population_std(&x.iter().map(|r| r[j]).collect::<Vec<_>>()).powi(2))
        .sum::<f64>()
        / d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

pub fn fit_rbf_residual(x: &[Vec<f64>], residuals: &[f64], hyper: &SvrHyper) -> Result<RbfResidualModel> {
    if x.len() != residuals.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: residuals.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InsufficientData("no residuals to fit".into()));
    }
    if !(hyper.c > 0.0) || !(hyper.tol > 0.0) {
        return Err(Error::InvalidParams("SVR needs C > 0 and tol > 0".into()));
    }
    let epsilon = hyper.epsilon.unwrap_or_else(|| 0.1 * population_std(residuals));
    let gamma = hyper.gamma.unwrap_or_else(|| scale_gamma(x));
    if !(epsilon >= 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParams("SVR needs epsilon >= 0 and gamma > 0".into()));
    }
    let n = x.len();
    let kernel = DMatrix::from_fn(n, n, |i, j| rbf(gamma, &x[i], &x[j]));
    let (weights, bias) = match hyper.solver {
        ResidualSolver::Smo => solve_smo(&kernel, residuals, epsilon, hyper)?,
        ResidualSolver::KernelRidge => solve_kernel_ridge(kernel, residuals, hyper.c)?,
    };
    let (support, weights) = x
        .iter()
        .zip(weights)
        .filter(|(_, w)| *w != 0.0)
        .map(|(p, w)| (p.clone(), w))
        .unzip();
    Ok(RbfResidualModel {
        support,
        weights,
        bias,
        gamma,
        epsilon,
        c: hyper.c,
    })
}

/// Epsilon-SVR dual by SMO. Returns per-point weights and the bias.
fn solve_smo(k: &DMatrix<f64>, z: &[f64], eps: f64, hyper: &SvrHyper) -> Result<(Vec<f64>, f64)> {
    let l = z.len();
    let c = hyper.c;
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };
    let idx = |t: usize| if t < l { t } else { t - l };
    // Q(s, t) = y_s y_t K(s, t); the RBF diagonal is 1.
    let q = |s: usize, t: usize| sign(s) * sign(t) * k[(idx(s), idx(t))];

    let mut alpha = vec![0.0; 2 * l];
    let mut grad: Vec<f64> = (0..2 * l)
        .map(|t| if t < l { eps - z[t] } else { eps + z[t - l] })
        .collect();
    let at_upper = |a: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;

    let mut iter = 0;
    let mut violation;
    loop {
        // First index: maximal violating pair, i from I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..2 * l {
            let v = if sign(t) > 0.0 {
                if at_upper(alpha[t]) { continue } else { -grad[t] }
            } else if at_lower(alpha[t]) {
                continue;
            } else {
                grad[t]
            };
            if v >= gmax {
                gmax = v;
                i = t;
            }
        }
        // Second index: largest objective decrease within I_low.
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        if i != usize::MAX {
            for t in 0..2 * l {
                let (in_low, g, quad) = if sign(t) > 0.0 {
                    (!at_lower(alpha[t]), grad[t], 2.0 - 2.0 * sign(i) * q(i, t))
                } else {
                    (!at_upper(alpha[t]), -grad[t], 2.0 + 2.0 * sign(i) * q(i, t))
                };
                if !in_low {
                    continue;
                }
                gmax2 = gmax2.max(g);
                let diff = gmax + g;
                if diff > 0.0 {
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        violation = gmax + gmax2;
        if j == usize::MAX || violation < hyper.tol {
            break;
        }
        if iter >= hyper.max_iter {
            return Err(Error::FitFailure {
                iterations: iter,
                violation,
            });
        }
        iter += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let quad = (2.0 + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (2.0 - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..2 * l {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // rho from free variables, else the midpoint of the feasible interval.
    let (mut ub, mut lb, mut sum_free, mut n_free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0);
    for t in 0..2 * l {
        let yg = sign(t) * grad[t];
        if at_upper(alpha[t]) {
            if sign(t) < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if at_lower(alpha[t]) {
            if sign(t) > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    let weights = (0..l).map(|i| alpha[i] - alpha[i + l]).collect();
    Ok((weights, -rho))
}

/// `(K + I / C) w = z - mean(z)`, bias `mean(z)`.
fn solve_kernel_ridge(mut k: DMatrix<f64>, z: &[f64], c: f64) -> Result<(Vec<f64>, f64)> {
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        k[(i, i)] += 1.0 / c;
    }
    let rhs = DVector::from_iterator(n, z.iter().map(|v| v - mean));
    let w = k.cholesky().ok_or(Error::SingularMatrix)?.solve(&rhs);
    Ok((w.iter().copied().collect(), mean))
}
