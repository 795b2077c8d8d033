//! Maximum-entropy classifier (multinomial logistic regression).
//!
//! Minimizes the mean negative log-likelihood of a softmax model plus an L2
//! penalty on the term weights (biases are not penalized), using L-BFGS with
//! an Armijo backtracking line search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{ClassifierError, FeatureVector, LabeledSet, Prediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxEntParams {
    pub l2_lambda: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for MaxEntParams {
    fn default() -> Self {
        MaxEntParams {
            l2_lambda: 1e-3,
            tolerance: 1e-6,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub tolerance: f64,
    pub max_iters: usize,
    pub iterations: usize,
    /// Max-norm of the gradient at the returned weights.
    pub achieved_grad_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntModel {
    n_classes: usize,
    n_features: usize,
    /// Row-major `n_classes x (n_features + 1)`; the last column is the bias.
    weights: Vec<f64>,
    pub l2_lambda: f64,
    pub convergence: Convergence,
}

impl MaxEntModel {
    pub fn from_weights(n_classes: usize, n_features: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), n_classes * (n_features + 1));
        MaxEntModel {
            n_classes,
            n_features,
            weights,
            l2_lambda: 0.0,
            convergence: Convergence {
                tolerance: 0.0,
                max_iters: 0,
                iterations: 0,
                achieved_grad_norm: f64::NAN,
                converged: false,
            },
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Term weights and bias of one class.
    pub fn class_row(&self, class: usize) -> (&[f64], f64) {
        let w = self.n_features + 1;
        let row = &self.weights[class * w..(class + 1) * w];
        (&row[..self.n_features], row[self.n_features])
    }

    /// Largest absolute term weight (biases excluded).
    pub fn max_term_weight(&self) -> f64 {
        (0..self.n_classes)
            .flat_map(|c| self.class_row(c).0.iter().copied())
            .fold(0.0, |m, w: f64| m.max(w.abs()))
    }
}

fn logits(weights: &[f64], n_classes: usize, n_features: usize, x: &FeatureVector) -> Vec<f64> {
    let w = n_features + 1;
    (0..n_classes)
        .map(|c| {
            let row = &weights[c * w..(c + 1) * w];
            x.dot(&row[..n_features]) + row[n_features]
        })
        .collect()
}

/// In-place softmax; returns log of the normalizer.
fn softmax(z: &mut [f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
    max + sum.ln()
}

/// Regularized objective and its gradient at `weights` (layout as in
/// [`MaxEntModel`]).
pub fn maxent_objective(data: &LabeledSet, weights: &[f64], l2_lambda: f64) -> (f64, Vec<f64>) {
    let k = data.n_classes();
    let d = data.n_features;
    let w = d + 1;
    assert_eq!(weights.len(), k * w);
    let n = data.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for (x, &y) in data.features.iter().zip(&data.labels) {
        let mut z = logits(weights, k, d, x);
        let true_logit = z[y];
        loss += softmax(&mut z) - true_logit;
        for (c, p) in z.iter().enumerate() {
            let r = p - if c == y { 1.0 } else { 0.0 };
            if r == 0.0 {
                continue;
            }
            let row = &mut grad[c * w..(c + 1) * w];
            for &(j, v) in x.entries() {
                if j < d {
                    row[j] += r * v;
                }
            }
            row[d] += r;
        }
    }
    loss /= n;
    for g in grad.iter_mut() {
        *g /= n;
    }
    let mut penalty = 0.0;
    for c in 0..k {
        for j in 0..d {
            let wcj = weights[c * w + j];
            penalty += wcj * wcj;
            grad[c * w + j] += l2_lambda * wcj;
        }
    }
    (loss + 0.5 * l2_lambda * penalty, grad)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const HISTORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

pub fn train_maxent(
    data: &LabeledSet,
    params: &MaxEntParams,
) -> Result<MaxEntModel, ClassifierError> {
    if !(params.l2_lambda >= 0.0 && params.l2_lambda.is_finite()) {
        return Err(ClassifierError::InvalidParameter(format!(
            "l2_lambda must be non-negative, got {}",
            params.l2_lambda
        )));
    }
    if params.tolerance.is_nan() || params.tolerance <= 0.0 {
        return Err(ClassifierError::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            params.tolerance
        )));
    }
    data.check_trainable()?;

    let k = data.n_classes();
    let d = data.n_features;
    let lambda = params.l2_lambda;
    let mut weights = vec![0.0; k * (d + 1)];
    let (mut f, mut g) = maxent_objective(data, &weights, lambda);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;

    while iterations < params.max_iters && max_norm(&g) >= params.tolerance {
        let mut direction = lbfgs_direction(&g, &history);
        let mut slope = dot(&g, &direction);
        if slope.is_nan() || slope >= 0.0 {
            // not a descent direction: restart from steepest descent
            history.clear();
            direction = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if history.is_empty() {
            1.0 / max_norm(&g).max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = weights
                .iter()
                .zip(&direction)
                .map(|(w, p)| w + step * p)
                .collect();
            let (f_new, g_new) = maxent_objective(data, &trial, lambda);
            if f_new <= f + ARMIJO_C1 * step * slope {
                accepted = Some((trial, f_new, g_new));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((trial, f_new, g_new)) = accepted else {
            break;
        };
        let s: Vec<f64> = trial.iter().zip(&weights).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        weights = trial;
        f = f_new;
        g = g_new;
    }

    let achieved = max_norm(&g);
    Ok(MaxEntModel {
        n_classes: k,
        n_features: d,
        weights,
        l2_lambda: lambda,
        convergence: Convergence {
            tolerance: params.tolerance,
            max_iters: params.max_iters,
            iterations,
            achieved_grad_norm: achieved,
            converged: achieved < params.tolerance,
        },
    })
}

/// L-BFGS two-loop recursion.
fn lbfgs_direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Softmax class probabilities; terms beyond the model's vocabulary are
/// ignored.
pub fn predict_maxent(model: &MaxEntModel, x: &FeatureVector) -> Prediction {
    let mut z = logits(&model.weights, model.n_classes, model.n_features, x);
    softmax(&mut z);
    Prediction::from_scores(z)
}
