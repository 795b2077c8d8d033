//! Trained pipelines (vocabulary + classifier) and their on-disk format.
//!
//! A model file is UTF-8 text:
//!
//! ```text
//! polsent-model 1
//! sha256 <64 lowercase hex digits>
//! <JSON payload>
//! ```
//!
//! The digest covers the payload bytes exactly as stored. Field order in the
//! payload is fixed, so identical models serialize to identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classifiers::{
    self, class_labels, Algorithm, ClassifierError, ClassifierModel, FeatureVector,
    Hyperparameters, LabeledSet, Prediction,
};
use crate::corpus::{
    build_tdm, project_tdm, remove_sparse_terms, Corpus, CorpusError, SentimentClass, TdmFlags,
    Vocabulary,
};
use crate::normalize::{EmoticonTable, Normalizer, Polarity, TableError};

pub const MODEL_MAGIC: &str = "polsent-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a model file: {0}")]
    Format(String),
    #[error("unsupported model version {0} (expected {MODEL_VERSION})")]
    UnsupportedVersion(u32),
    #[error("model checksum mismatch: header says {expected}, payload hashes to {actual}")]
    Checksum { expected: String, actual: String },
    #[error("corrupt model payload: {0}")]
    Payload(#[from] serde_json::Error),
    #[error("corpus has unscored documents")]
    Unscored,
    #[error("class {0} was not seen during training")]
    UnknownClass(SentimentClass),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub params: Hyperparameters,
    pub sparse: f64,
    /// Feed presence/absence instead of counts. Naive Bayes always binarizes.
    pub binarize: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            algorithm: Algorithm::Nb,
            params: Hyperparameters::default(),
            sparse: 0.99,
            binarize: false,
            seed: 2015,
        }
    }
}

impl TrainConfig {
    pub fn effective_binarize(&self) -> bool {
        self.binarize || self.algorithm == Algorithm::Nb
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub class_names: Vec<SentimentClass>,
    pub vocabulary: Vec<String>,
    pub binarize: bool,
    pub sparse: f64,
    pub seed: u64,
    pub params: Hyperparameters,
    pub emoticons: Vec<(String, Polarity)>,
    pub classifier: ClassifierModel,
}

/// Features and class ids of a scored corpus, against a fixed vocabulary.
pub struct Encoded {
    pub data: LabeledSet,
    pub vocabulary: Vocabulary,
}

fn labeled(corpus: &Corpus) -> Result<(Vec<usize>, Vec<SentimentClass>), ModelError> {
    class_labels(corpus).ok_or(ModelError::Unscored)
}

fn names(classes: &[SentimentClass]) -> Vec<String> {
    classes.iter().map(|c| c.to_string()).collect()
}

/// Builds the document-term matrix of `corpus`, prunes it and encodes the
/// scored classes.
pub fn encode_training(
    corpus: &Corpus,
    normalizer: &Normalizer,
    sparse: f64,
    binarize: bool,
) -> Result<(Encoded, Vec<SentimentClass>), ModelError> {
    let (labels, classes) = labeled(corpus)?;
    let tdm = remove_sparse_terms(&build_tdm(corpus, normalizer, TdmFlags::default())?, sparse)?;
    let data = LabeledSet::from_tdm(&tdm, labels, names(&classes), binarize)?;
    Ok((
        Encoded {
            data,
            vocabulary: tdm.vocab().clone(),
        },
        classes,
    ))
}

pub fn fit(
    corpus: &Corpus,
    normalizer: &Normalizer,
    config: &TrainConfig,
) -> Result<TrainedModel, ModelError> {
    let binarize = config.effective_binarize();
    let (encoded, classes) = encode_training(corpus, normalizer, config.sparse, binarize)?;
    let classifier =
        classifiers::train(config.algorithm, &encoded.data, &config.params, config.seed)?;
    Ok(TrainedModel {
        class_names: classes,
        vocabulary: encoded.vocabulary.terms().to_vec(),
        binarize,
        sparse: config.sparse,
        seed: config.seed,
        params: config.params,
        emoticons: normalizer.emoticons.entries().to_vec(),
        classifier,
    })
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        self.classifier.algorithm()
    }

    pub fn normalizer(&self) -> Result<Normalizer, ModelError> {
        Ok(Normalizer::new(EmoticonTable::new(self.emoticons.clone())?))
    }

    pub fn features(&self, corpus: &Corpus) -> Result<Vec<FeatureVector>, ModelError> {
        let vocab = Vocabulary::from_terms(self.vocabulary.clone());
        let tdm = project_tdm(corpus, &self.normalizer()?, &vocab);
        Ok(tdm
            .rows()
            .iter()
            .map(|row| FeatureVector::from_counts(row, self.binarize))
            .collect())
    }

    /// Encodes a scored corpus with this model's vocabulary and class ids.
    pub fn labeled_set(&self, corpus: &Corpus) -> Result<LabeledSet, ModelError> {
        let labels = corpus
            .documents
            .iter()
            .map(|d| {
                let class = d.senti_class.ok_or(ModelError::Unscored)?;
                self.class_names
                    .iter()
                    .position(|&c| c == class)
                    .ok_or(ModelError::UnknownClass(class))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let features = self.features(corpus)?;
        Ok(LabeledSet::new(
            features,
            labels,
            names(&self.class_names),
            self.vocabulary.len(),
        )?)
    }

    pub fn predict(&self, corpus: &Corpus) -> Result<Vec<Prediction>, ModelError> {
        Ok(self
            .features(corpus)?
            .iter()
            .map(|x| self.classifier.predict(x))
            .collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = serde_json::to_string(self).expect("model serializes");
        let mut out = format!(
            "{MODEL_MAGIC} {MODEL_VERSION}\nsha256 {}\n",
            sha256_hex(payload.as_bytes())
        );
        out.push_str(&payload);
        out.push('\n');
        out.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let text =
            std::str::from_utf8(bytes).map_err(|_| ModelError::Format("not UTF-8".into()))?;
        let mut parts = text.splitn(3, '\n');
        let header = parts.next().unwrap_or("");
        let digest_line = parts
            .next()
            .ok_or_else(|| ModelError::Format("truncated header".into()))?;
        let payload = parts
            .next()
            .ok_or_else(|| ModelError::Format("missing payload".into()))?;
        let payload = payload.strip_suffix('\n').unwrap_or(payload);

        let version = header
            .strip_prefix(MODEL_MAGIC)
            .and_then(|v| v.strip_prefix(' '))
            .ok_or_else(|| ModelError::Format(format!("bad header {header:?}")))?;
        let version: u32 = version
            .parse()
            .map_err(|_| ModelError::Format(format!("bad version {version:?}")))?;
        if version != MODEL_VERSION {
            return Err(ModelError::UnsupportedVersion(version));
        }
        let expected = digest_line
            .strip_prefix("sha256 ")
            .ok_or_else(|| ModelError::Format("missing sha256 line".into()))?;
        let actual = sha256_hex(payload.as_bytes());
        if expected != actual {
            return Err(ModelError::Checksum {
                expected: expected.to_string(),
                actual,
            });
        }
        Ok(serde_json::from_str(payload)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| ModelError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => ModelError::MissingFile(path.to_path_buf()),
            _ => ModelError::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        Self::from_bytes(&bytes)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        write!(hex, "{b:02x}").expect("writing to a String");
    }
    hex
}
