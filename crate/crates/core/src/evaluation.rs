//! Confusion matrices, accuracy / precision / recall / F-score and k-fold
//! cross-validation.
//!
//! Matrices are oriented rows = actual class, columns = predicted class.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classifiers::{self, Algorithm, ClassifierError, Hyperparameters, LabeledSet};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{actual} actual labels but {predicted} predicted labels")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no examples to evaluate")]
    EmptyMatrix,
    #[error("label {0} is not one of the matrix classes")]
    UnknownLabel(usize),
    #[error("cross-validation needs k >= 2 and at least k examples (k = {k}, examples = {n})")]
    TooFewExamples { k: usize, n: usize },
    #[error("fold {fold}: training portion contains a single class")]
    SingleClassFold { fold: usize },
    #[error("fold {fold}: {source}")]
    Training {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    /// Row-major `classes x classes`.
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Builds a matrix from rows of counts (`rows[actual][predicted]`).
    ///
    /// # Panics
    /// If `rows` is not square with one row per class.
    pub fn from_rows(classes: Vec<String>, rows: &[Vec<u64>]) -> Self {
        let k = classes.len();
        assert_eq!(rows.len(), k, "need one row per class");
        assert!(rows.iter().all(|r| r.len() == k), "matrix must be square");
        ConfusionMatrix {
            classes,
            counts: rows.concat(),
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual * self.n_classes() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.get(c, c)).sum()
    }

    pub fn row_sum(&self, class: usize) -> u64 {
        (0..self.n_classes()).map(|p| self.get(class, p)).sum()
    }

    pub fn col_sum(&self, class: usize) -> u64 {
        (0..self.n_classes()).map(|a| self.get(a, class)).sum()
    }

    pub fn transpose(&self) -> ConfusionMatrix {
        let k = self.n_classes();
        let rows: Vec<Vec<u64>> = (0..k)
            .map(|p| (0..k).map(|a| self.get(a, p)).collect())
            .collect();
        ConfusionMatrix::from_rows(self.classes.clone(), &rows)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.n_classes().max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }
}

/// Counts `(actual, predicted)` pairs into a `classes x classes` matrix.
pub fn confusion_matrix(
    actual: &[usize],
    predicted: &[usize],
    classes: &[String],
) -> Result<ConfusionMatrix, EvalError> {
    if actual.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(EvalError::EmptyMatrix);
    }
    let k = classes.len();
    let mut counts = vec![0u64; k * k];
    for (&a, &p) in actual.iter().zip(predicted) {
        if a >= k {
            return Err(EvalError::UnknownLabel(a));
        }
        if p >= k {
            return Err(EvalError::UnknownLabel(p));
        }
        counts[a * k + p] += 1;
    }
    Ok(ConfusionMatrix {
        classes: classes.to_vec(),
        counts,
    })
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    match cm.total() {
        0 => Err(EvalError::EmptyMatrix),
        total => Ok(cm.trace() as f64 / total as f64),
    }
}

/// `None` when nothing was predicted as `class`.
pub fn precision(cm: &ConfusionMatrix, class: usize) -> Option<f64> {
    match cm.col_sum(class) {
        0 => None,
        col => Some(cm.get(class, class) as f64 / col as f64),
    }
}

/// `None` when `class` never occurs.
pub fn recall(cm: &ConfusionMatrix, class: usize) -> Option<f64> {
    match cm.row_sum(class) {
        0 => None,
        row => Some(cm.get(class, class) as f64 / row as f64),
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Absent when either precision or recall is undefined.
    pub f1: Option<f64>,
}

/// A macro average over the defined per-class values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroAverage {
    pub value: Option<f64>,
    /// Classes left out because their value was undefined.
    pub skipped: usize,
}

impl MacroAverage {
    fn over(values: impl Iterator<Item = Option<f64>>) -> Self {
        let mut sum = 0.0;
        let mut n = 0;
        let mut skipped = 0;
        for v in values {
            match v {
                Some(v) => {
                    sum += v;
                    n += 1;
                }
                None => skipped += 1,
            }
        }
        MacroAverage {
            value: (n > 0).then(|| sum / n as f64),
            skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: MacroAverage,
    pub macro_recall: MacroAverage,
    pub macro_f1: MacroAverage,
}

pub fn metrics_report(cm: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    let accuracy = accuracy(cm)?;
    let per_class: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let p = precision(cm, c);
            let r = recall(cm, c);
            ClassMetrics {
                class: cm.classes[c].clone(),
                precision: p,
                recall: r,
                f1: p.zip(r).map(|(p, r)| f_score(p, r)),
            }
        })
        .collect();
    Ok(MetricsReport {
        accuracy,
        macro_precision: MacroAverage::over(per_class.iter().map(|m| m.precision)),
        macro_recall: MacroAverage::over(per_class.iter().map(|m| m.recall)),
        macro_f1: MacroAverage::over(per_class.iter().map(|m| m.f1)),
        per_class,
    })
}

/// Classifies every example of `data` and tabulates the result.
pub fn evaluate_model(
    model: &classifiers::ClassifierModel,
    data: &LabeledSet,
) -> Result<ConfusionMatrix, EvalError> {
    let predicted: Vec<usize> = data
        .features
        .iter()
        .map(|x| model.predict(x).label)
        .collect();
    confusion_matrix(&data.labels, &predicted, &data.class_names)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub k: usize,
    pub seed: u64,
}

impl CvResult {
    pub fn from_folds(fold_accuracies: Vec<f64>, seed: u64) -> Self {
        CvResult {
            k: fold_accuracies.len(),
            mean_accuracy: mean(&fold_accuracies),
            fold_accuracies,
            seed,
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Shuffles `0..n` once with `seed` and cuts it into `k` contiguous folds
/// whose sizes differ by at most one (larger folds first).
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 || n < k {
        return Err(EvalError::TooFewExamples { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// k-fold cross-validation: fold `i` is held out while a model is trained on
/// the rest. Folds are fixed before any (parallel) training starts.
pub fn cross_validate(
    data: &LabeledSet,
    k: usize,
    algorithm: Algorithm,
    params: &Hyperparameters,
    seed: u64,
) -> Result<CvResult, EvalError> {
    let folds = kfold_indices(data.len(), k, seed)?;
    let fold_accuracies = folds
        .par_iter()
        .enumerate()
        .map(|(i, test_idx)| {
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            let train = data.subset(&train_idx);
            let test = data.subset(test_idx);
            let model =
                classifiers::train(algorithm, &train, params, seed).map_err(|e| match e {
                    ClassifierError::SingleClass => EvalError::SingleClassFold { fold: i + 1 },
                    other => EvalError::Training {
                        fold: i + 1,
                        source: other,
                    },
                })?;
            accuracy(&evaluate_model(&model, &test)?)
        })
        .collect::<Result<Vec<f64>, EvalError>>()?;
    Ok(CvResult::from_folds(fold_accuracies, seed))
}
