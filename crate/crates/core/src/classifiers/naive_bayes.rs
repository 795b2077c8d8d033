//! Bernoulli naive Bayes over term presence.

use serde::{Deserialize, Serialize};

use super::{ClassifierError, FeatureVector, LabeledSet, Prediction};

/// Sufficient statistics; the serialized form of [`NaiveBayesModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NbCounts {
    alpha: f64,
    class_counts: Vec<u64>,
    /// `doc_freq[c][t]`: training documents of class `c` containing term `t`.
    doc_freq: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "NbCounts", into = "NbCounts")]
pub struct NaiveBayesModel {
    counts: NbCounts,
    log_priors: Vec<f64>,
    log_present: Vec<Vec<f64>>,
    log_absent: Vec<Vec<f64>>,
    /// Per class, the score of an all-absent vector.
    absent_total: Vec<f64>,
}

impl From<NbCounts> for NaiveBayesModel {
    fn from(counts: NbCounts) -> Self {
        let n_docs: u64 = counts.class_counts.iter().sum();
        let alpha = counts.alpha;
        let mut log_priors = Vec::new();
        let mut log_present = Vec::new();
        let mut log_absent = Vec::new();
        for (c, &n_c) in counts.class_counts.iter().enumerate() {
            log_priors.push((n_c as f64 / n_docs as f64).ln());
            let denom = n_c as f64 + 2.0 * alpha;
            let (present, absent): (Vec<f64>, Vec<f64>) = counts.doc_freq[c]
                .iter()
                .map(|&df| {
                    (
                        ((df as f64 + alpha) / denom).ln(),
                        (((n_c - df) as f64 + alpha) / denom).ln(),
                    )
                })
                .unzip();
            log_present.push(present);
            log_absent.push(absent);
        }
        let absent_total = log_absent.iter().map(|row| row.iter().sum()).collect();
        NaiveBayesModel {
            counts,
            log_priors,
            log_present,
            log_absent,
            absent_total,
        }
    }
}

impl From<NaiveBayesModel> for NbCounts {
    fn from(model: NaiveBayesModel) -> Self {
        model.counts
    }
}

impl NaiveBayesModel {
    pub fn alpha(&self) -> f64 {
        self.counts.alpha
    }

    pub fn n_classes(&self) -> usize {
        self.log_priors.len()
    }

    pub fn n_features(&self) -> usize {
        self.counts.doc_freq.first().map_or(0, Vec::len)
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    /// `log P(term present | class)`.
    pub fn log_present(&self, class: usize, term: usize) -> f64 {
        self.log_present[class][term]
    }

    /// `log P(term absent | class)`.
    pub fn log_absent(&self, class: usize, term: usize) -> f64 {
        self.log_absent[class][term]
    }
}

/// Fits class priors and Laplace-smoothed per-class presence probabilities:
/// `P(t | c) = (df(t, c) + alpha) / (n_c + 2 alpha)`. Any non-zero feature
/// value counts as presence.
pub fn train_naive_bayes(
    data: &LabeledSet,
    alpha: f64,
) -> Result<NaiveBayesModel, ClassifierError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifierError::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    data.check_trainable()?;
    let n_classes = data.n_classes();
    let mut class_counts = vec![0u64; n_classes];
    let mut doc_freq = vec![vec![0u64; data.n_features]; n_classes];
    for (x, &y) in data.features.iter().zip(&data.labels) {
        class_counts[y] += 1;
        for &(t, _) in x.entries() {
            if t < data.n_features {
                doc_freq[y][t] += 1;
            }
        }
    }
    Ok(NbCounts {
        alpha,
        class_counts,
        doc_freq,
    }
    .into())
}

/// Log joint score per class; terms outside the model's vocabulary are
/// ignored.
pub fn predict_naive_bayes(model: &NaiveBayesModel, x: &FeatureVector) -> Prediction {
    let d = model.n_features();
    let scores = (0..model.n_classes())
        .map(|c| {
            let present: f64 = x
                .entries()
                .iter()
                .filter(|&&(t, v)| t < d && v != 0.0)
                .map(|&(t, _)| model.log_present[c][t] - model.log_absent[c][t])
                .sum();
            model.log_priors[c] + model.absent_total[c] + present
        })
        .collect();
    Prediction::from_scores(scores)
}
