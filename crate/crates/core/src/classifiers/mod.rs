//! Supervised classifiers over sparse term features.
//!
//! All four models share the same input ([`LabeledSet`]) and output
//! ([`Prediction`]) types. Ties in the per-class scores always resolve to the
//! lowest class id.

mod maxent;
mod naive_bayes;
mod svm;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, SentimentClass, TermDocumentMatrix};

pub use maxent::{
    maxent_objective, predict_maxent, train_maxent, Convergence, MaxEntModel, MaxEntParams,
};
pub use naive_bayes::{predict_naive_bayes, train_naive_bayes, NaiveBayesModel};
pub use svm::{predict_svm, train_svm, LinearSvmModel, SvmParams};
pub use tree::{
    best_split, gini, predict_tree, split_impurity, train_tree, DecisionTreeModel, Split,
    ThresholdMode, TreeNode, TreeParams,
};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),
}

/// Sparse feature vector: `(column, value)` pairs sorted by column, with no
/// zero values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    entries: Vec<(usize, f64)>,
    binarized: bool,
}

impl FeatureVector {
    pub fn new(mut entries: Vec<(usize, f64)>) -> Self {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(c, _)| c);
        entries.dedup_by_key(|&mut (c, _)| c);
        FeatureVector {
            entries,
            binarized: false,
        }
    }

    /// Presence/absence vector: every stored value is 1.
    pub fn binary(columns: impl IntoIterator<Item = usize>) -> Self {
        let mut cols: Vec<usize> = columns.into_iter().collect();
        cols.sort_unstable();
        cols.dedup();
        FeatureVector {
            entries: cols.into_iter().map(|c| (c, 1.0)).collect(),
            binarized: true,
        }
    }

    pub fn from_counts(row: &[(usize, u32)], binarize: bool) -> Self {
        if binarize {
            Self::binary(row.iter().map(|&(c, _)| c))
        } else {
            Self::new(row.iter().map(|&(c, n)| (c, f64::from(n))).collect())
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_binarized(&self) -> bool {
        self.binarized
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, column: usize) -> f64 {
        self.entries
            .binary_search_by_key(&column, |&(c, _)| c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// Dot product with a dense weight row; columns beyond it are ignored.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter(|&&(c, _)| c < weights.len())
            .map(|&(c, v)| weights[c] * v)
            .sum()
    }
}

/// Feature vectors with class ids in `0..class_names.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub n_features: usize,
}

impl LabeledSet {
    pub fn new(
        features: Vec<FeatureVector>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        n_features: usize,
    ) -> Result<Self, ClassifierError> {
        if features.len() != labels.len() {
            return Err(ClassifierError::LengthMismatch {
                features: features.len(),
                labels: labels.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(ClassifierError::LabelOutOfRange {
                label,
                classes: class_names.len(),
            });
        }
        Ok(LabeledSet {
            features,
            labels,
            class_names,
            n_features,
        })
    }

    pub fn from_tdm(
        tdm: &TermDocumentMatrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
        binarize: bool,
    ) -> Result<Self, ClassifierError> {
        let features = tdm
            .rows()
            .iter()
            .map(|row| FeatureVector::from_counts(row, binarize))
            .collect();
        Self::new(features, labels, class_names, tdm.n_terms())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            n_features: self.n_features,
        }
    }

    /// Common training precondition: non-empty with at least two classes.
    pub(crate) fn check_trainable(&self) -> Result<(), ClassifierError> {
        if self.is_empty() {
            return Err(ClassifierError::EmptyTrainingSet);
        }
        if self.class_counts().iter().filter(|&&n| n > 0).count() < 2 {
            return Err(ClassifierError::SingleClass);
        }
        Ok(())
    }
}

/// Class ids for scored documents: the distinct classes present, in
/// Negative < Neutral < Positive order.
pub fn class_labels(corpus: &Corpus) -> Option<(Vec<usize>, Vec<SentimentClass>)> {
    let mut present: Vec<SentimentClass> = corpus
        .documents
        .iter()
        .map(|d| d.senti_class)
        .collect::<Option<Vec<_>>>()?;
    present.sort_unstable();
    present.dedup();
    let labels = corpus
        .documents
        .iter()
        .map(|d| {
            let class = d.senti_class.expect("checked above");
            present.binary_search(&class).expect("class is present")
        })
        .collect();
    Some((labels, present))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    pub fn from_scores(scores: Vec<f64>) -> Self {
        Prediction {
            label: argmax(&scores),
            scores,
        }
    }
}

/// Relative gap under which two scores count as tied. Log scores that are
/// mathematically equal can differ in the last bit after summation.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the largest value; the first one within [`TIE_TOLERANCE`] of it
/// wins ties. NaN never wins.
pub fn argmax(values: &[f64]) -> usize {
    let Some(max) = values
        .iter()
        .copied()
        .filter(|v| !v.is_nan())
        .reduce(f64::max)
    else {
        return 0;
    };
    let slack = if max.is_finite() {
        TIE_TOLERANCE * max.abs().max(1.0)
    } else {
        0.0
    };
    values.iter().position(|&v| v >= max - slack).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nb,
    Maxent,
    Svm,
    Tree,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" => Ok(Algorithm::Nb),
            "maxent" => Ok(Algorithm::Maxent),
            "svm" => Ok(Algorithm::Svm),
            "tree" => Ok(Algorithm::Tree),
            other => Err(format!(
                "unknown algorithm {other:?} (expected nb, maxent, svm or tree)"
            )),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Nb => "nb",
            Algorithm::Maxent => "maxent",
            Algorithm::Svm => "svm",
            Algorithm::Tree => "tree",
        })
    }
}

/// Hyperparameters for every algorithm; only the fields of the selected one
/// are read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub alpha: f64,
    pub maxent: MaxEntParams,
    pub svm: SvmParams,
    pub tree: TreeParams,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            alpha: 1.0,
            maxent: MaxEntParams::default(),
            svm: SvmParams::default(),
            tree: TreeParams::default(),
        }
    }
}

/// A trained model of any of the four kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum ClassifierModel {
    Nb(NaiveBayesModel),
    Maxent(MaxEntModel),
    Svm(LinearSvmModel),
    Tree(DecisionTreeModel),
}

impl ClassifierModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ClassifierModel::Nb(_) => Algorithm::Nb,
            ClassifierModel::Maxent(_) => Algorithm::Maxent,
            ClassifierModel::Svm(_) => Algorithm::Svm,
            ClassifierModel::Tree(_) => Algorithm::Tree,
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> Prediction {
        match self {
            ClassifierModel::Nb(m) => predict_naive_bayes(m, x),
            ClassifierModel::Maxent(m) => predict_maxent(m, x),
            ClassifierModel::Svm(m) => predict_svm(m, x),
            ClassifierModel::Tree(m) => predict_tree(m, x),
        }
    }
}

pub fn train(
    algorithm: Algorithm,
    data: &LabeledSet,
    params: &Hyperparameters,
    seed: u64,
) -> Result<ClassifierModel, ClassifierError> {
    Ok(match algorithm {
        Algorithm::Nb => ClassifierModel::Nb(train_naive_bayes(data, params.alpha)?),
        Algorithm::Maxent => ClassifierModel::Maxent(train_maxent(data, &params.maxent)?),
        Algorithm::Svm => ClassifierModel::Svm(train_svm(data, &params.svm, seed)?),
        Algorithm::Tree => ClassifierModel::Tree(train_tree(data, &params.tree)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_id_on_ties() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
        assert_eq!(argmax(&[f64::NAN, 0.0]), 1);
        assert_eq!(argmax(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), 0);
    }

    #[test]
    fn feature_vector_normalizes_entries() {
        let v = FeatureVector::new(vec![(3, 2.0), (1, 0.0), (0, 1.5)]);
        assert_eq!(v.entries(), &[(0, 1.5), (3, 2.0)]);
        assert_eq!(v.get(3), 2.0);
        assert_eq!(v.get(1), 0.0);
        assert_eq!(v.dot(&[2.0, 0.0, 0.0]), 3.0);
        let b = FeatureVector::from_counts(&[(0, 3), (2, 1)], true);
        assert!(b.is_binarized());
        assert!(b.entries().iter().all(|&(_, v)| v == 1.0));
    }

    #[test]
    fn labeled_set_validation() {
        let f = vec![FeatureVector::binary([0])];
        assert!(matches!(
            LabeledSet::new(f.clone(), vec![0, 1], vec!["a".into(), "b".into()], 1),
            Err(ClassifierError::LengthMismatch { .. })
        ));
        assert!(matches!(
            LabeledSet::new(f, vec![2], vec!["a".into(), "b".into()], 1),
            Err(ClassifierError::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn class_labels_follow_enum_order() {
        use crate::corpus::Document;
        let mut docs = Vec::new();
        for class in [
            SentimentClass::Positive,
            SentimentClass::Negative,
            SentimentClass::Positive,
        ] {
            let mut d = Document::new("", "", "");
            d.senti_class = Some(class);
            docs.push(d);
        }
        let (labels, classes) = class_labels(&Corpus::new(docs)).unwrap();
        assert_eq!(
            classes,
            vec![SentimentClass::Negative, SentimentClass::Positive]
        );
        assert_eq!(labels, vec![1, 0, 1]);
        assert!(class_labels(&Corpus::new(vec![Document::new("", "", "")])).is_none());
    }
}
