//! Documents, corpora, sparse term-document matrices and train/test splits.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::Normalizer;

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("document {0} has not been scored")]
    Unscored(usize),
    #[error("training fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("sparse threshold must lie in (0, 1], got {0}")]
    InvalidSparse(f64),
}

/// Three-way sentiment label. The declaration order is the class-id order
/// used by the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SentimentClass {
    Negative,
    Neutral,
    Positive,
}

impl SentimentClass {
    pub const ALL: [SentimentClass; 3] = [
        SentimentClass::Negative,
        SentimentClass::Neutral,
        SentimentClass::Positive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentClass::Negative => "Negative",
            SentimentClass::Neutral => "Neutral",
            SentimentClass::Positive => "Positive",
        }
    }
}

impl fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Negative" => Ok(SentimentClass::Negative),
            "Neutral" => Ok(SentimentClass::Neutral),
            "Positive" => Ok(SentimentClass::Positive),
            other => Err(format!("unknown sentiment class {other:?}")),
        }
    }
}

/// One tweet-like record. Score and class stay `None` until scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub senti_score: Option<i64>,
    pub text: String,
    pub code: String,
    pub candidate: String,
    pub senti_class: Option<SentimentClass>,
}

impl Document {
    pub fn new(
        text: impl Into<String>,
        code: impl Into<String>,
        candidate: impl Into<String>,
    ) -> Self {
        Document {
            senti_score: None,
            text: text.into(),
            code: code.into(),
            candidate: candidate.into(),
            senti_class: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub provenance: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus {
            documents,
            provenance: String::new(),
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn is_scored(&self) -> bool {
        self.documents
            .iter()
            .all(|d| d.senti_score.is_some() && d.senti_class.is_some())
    }

    /// Documents at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Keeps documents with a non-zero score, in order.
pub fn filter_neutral(corpus: &Corpus) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::with_capacity(corpus.len());
    for (i, doc) in corpus.documents.iter().enumerate() {
        match doc.senti_score {
            None => return Err(CorpusError::Unscored(i)),
            Some(0) => {}
            Some(_) => documents.push(doc.clone()),
        }
    }
    Ok(Corpus {
        documents,
        provenance: corpus.provenance.clone(),
    })
}

/// Term axis of a term-document matrix: terms in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_terms(terms: Vec<String>) -> Self {
        let mut vocab = Vocabulary::default();
        for t in terms {
            vocab.insert(t);
        }
        vocab
    }

    /// Column id of `term`, adding it if unseen.
    pub fn insert(&mut self, term: String) -> usize {
        if let Some(&id) = self.index.get(&term) {
            return id;
        }
        let id = self.terms.len();
        self.index.insert(term.clone(), id);
        self.terms.push(term);
        id
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Flags carried for parity with the reference `DocumentTermMatrix`
/// controls. The tokenizer already drops punctuation and whitespace, so both
/// are no-ops here.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdmFlags {
    pub remove_punctuation: bool,
    pub strip_whitespace: bool,
}

/// Sparse document-by-term count matrix in compressed-row form. Each row
/// holds `(column, count)` pairs sorted by column; zero counts are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDocumentMatrix {
    vocab: Vocabulary,
    rows: Vec<Vec<(usize, u32)>>,
    flags: TdmFlags,
}

impl TermDocumentMatrix {
    /// Builds a matrix directly from rows of `(column, count)` pairs.
    ///
    /// # Panics
    /// If a column is out of range or a count is zero.
    pub fn from_rows(vocab: Vocabulary, mut rows: Vec<Vec<(usize, u32)>>) -> Self {
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, n) in row.iter() {
                assert!(c < vocab.len(), "column {c} out of range");
                assert!(n > 0, "zero count stored");
            }
        }
        TermDocumentMatrix {
            vocab,
            rows,
            flags: TdmFlags::default(),
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn flags(&self) -> TdmFlags {
        self.flags
    }

    pub fn row(&self, doc: usize) -> &[(usize, u32)] {
        &self.rows[doc]
    }

    pub fn rows(&self) -> &[Vec<(usize, u32)>] {
        &self.rows
    }

    pub fn get(&self, doc: usize, term: usize) -> u32 {
        let row = &self.rows[doc];
        row.binary_search_by_key(&term, |&(c, _)| c)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }

    /// Number of stored (non-zero) cells.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn total_count(&self) -> u64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|&(_, n)| u64::from(n)))
            .sum()
    }

    /// Document frequency of every column.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.vocab.len()];
        for row in &self.rows {
            for &(c, _) in row {
                df[c] += 1;
            }
        }
        df
    }

    /// Rows at `indices`, sharing this matrix's vocabulary.
    pub fn select_rows(&self, indices: &[usize]) -> TermDocumentMatrix {
        TermDocumentMatrix {
            vocab: self.vocab.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            flags: self.flags,
        }
    }
}

fn count_row(tokens: &[String], vocab: &mut Vocabulary) -> Vec<(usize, u32)> {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for t in tokens {
        *counts.entry(vocab.insert(t.clone())).or_default() += 1;
    }
    let mut row: Vec<_> = counts.into_iter().collect();
    row.sort_unstable_by_key(|&(c, _)| c);
    row
}

fn tokenize_all(corpus: &Corpus, normalizer: &Normalizer) -> Vec<Vec<String>> {
    corpus
        .documents
        .par_iter()
        .map(|d| normalizer.tokens(&d.text))
        .collect()
}

/// Counts normalized tokens per document. Vocabulary order is first-seen
/// order by document index, then position within the document.
pub fn build_tdm(
    corpus: &Corpus,
    normalizer: &Normalizer,
    flags: TdmFlags,
) -> Result<TermDocumentMatrix, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let tokens = tokenize_all(corpus, normalizer);
    let mut vocab = Vocabulary::default();
    let rows = tokens.iter().map(|t| count_row(t, &mut vocab)).collect();
    Ok(TermDocumentMatrix { vocab, rows, flags })
}

/// Counts tokens against a fixed vocabulary; unknown terms are dropped.
pub fn project_tdm(
    corpus: &Corpus,
    normalizer: &Normalizer,
    vocab: &Vocabulary,
) -> TermDocumentMatrix {
    let rows = tokenize_all(corpus, normalizer)
        .into_iter()
        .map(|tokens| {
            let mut counts: HashMap<usize, u32> = HashMap::new();
            for t in &tokens {
                if let Some(id) = vocab.get(t) {
                    *counts.entry(id).or_default() += 1;
                }
            }
            let mut row: Vec<_> = counts.into_iter().collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            row
        })
        .collect();
    TermDocumentMatrix {
        vocab: vocab.clone(),
        rows,
        flags: TdmFlags::default(),
    }
}

/// Keeps the terms whose sparsity `1 - df/n` is strictly below `sparse`.
/// Surviving columns are renumbered in their original order.
pub fn remove_sparse_terms(
    tdm: &TermDocumentMatrix,
    sparse: f64,
) -> Result<TermDocumentMatrix, CorpusError> {
    if !(sparse > 0.0 && sparse <= 1.0) {
        return Err(CorpusError::InvalidSparse(sparse));
    }
    let n = tdm.n_docs();
    let df = tdm.document_frequencies();
    let mut remap = vec![None; tdm.n_terms()];
    let mut vocab = Vocabulary::default();
    for (col, &d) in df.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let sparsity = (n - d) as f64 / n as f64;
        if sparsity < sparse {
            remap[col] = Some(vocab.insert(tdm.vocab.term(col).to_string()));
        }
    }
    let rows = tdm
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .filter_map(|&(c, count)| remap[c].map(|nc| (nc, count)))
                .collect()
        })
        .collect();
    Ok(TermDocumentMatrix {
        vocab,
        rows,
        flags: tdm.flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitLabel {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment {
    pub labels: Vec<SplitLabel>,
    pub seed: u64,
    pub p_train: f64,
    pub p_test: f64,
}

impl SplitAssignment {
    pub fn indices(&self, which: SplitLabel) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == which)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| **l == SplitLabel::Train)
            .count()
    }

    pub fn test_count(&self) -> usize {
        self.labels.len() - self.train_count()
    }

    /// `(train, test)` corpora, each in original order.
    pub fn apply(&self, corpus: &Corpus) -> (Corpus, Corpus) {
        (
            corpus.select(&self.indices(SplitLabel::Train)),
            corpus.select(&self.indices(SplitLabel::Test)),
        )
    }
}

/// Labels each of `n_docs` documents Train with probability `p_train`,
/// independently, from a ChaCha8 stream seeded with `seed`.
pub fn split_train_test(
    n_docs: usize,
    seed: u64,
    p_train: f64,
) -> Result<SplitAssignment, CorpusError> {
    if !(p_train > 0.0 && p_train < 1.0) {
        return Err(CorpusError::InvalidFraction(p_train));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..n_docs)
        .map(|_| {
            if rng.gen::<f64>() < p_train {
                SplitLabel::Train
            } else {
                SplitLabel::Test
            }
        })
        .collect();
    Ok(SplitAssignment {
        labels,
        seed,
        p_train,
        p_test: 1.0 - p_train,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus_of(texts: &[&str]) -> Corpus {
        Corpus::new(texts.iter().map(|t| Document::new(*t, "c", "C")).collect())
    }

    #[test]
    fn builds_hand_counted_matrix() {
        let tdm = build_tdm(
            &corpus_of(&["a b a", "b c"]),
            &Normalizer::default(),
            TdmFlags::default(),
        )
        .unwrap();
        assert_eq!(tdm.vocab().terms(), ["a", "b", "c"]);
        assert_eq!(tdm.row(0), &[(0, 2), (1, 1)]);
        assert_eq!(tdm.row(1), &[(1, 1), (2, 1)]);
        assert_eq!(tdm.get(1, 0), 0);
        assert_eq!(tdm.total_count(), 5);
    }

    #[test]
    fn single_empty_document() {
        let tdm = build_tdm(
            &corpus_of(&[""]),
            &Normalizer::default(),
            TdmFlags::default(),
        )
        .unwrap();
        assert!(tdm.vocab().is_empty());
        assert_eq!(tdm.nnz(), 0);
        assert_eq!(tdm.n_docs(), 1);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = build_tdm(
            &Corpus::default(),
            &Normalizer::default(),
            TdmFlags::default(),
        );
        assert_eq!(err.unwrap_err(), CorpusError::EmptyCorpus);
    }

    fn one_term_in_ten() -> TermDocumentMatrix {
        let mut vocab = Vocabulary::default();
        vocab.insert("x".into());
        let mut rows = vec![Vec::new(); 10];
        rows[3] = vec![(0, 1)];
        TermDocumentMatrix::from_rows(vocab, rows)
    }

    #[test]
    fn sparse_threshold_is_strict() {
        let tdm = one_term_in_ten();
        assert_eq!(remove_sparse_terms(&tdm, 0.95).unwrap().n_terms(), 1);
        assert_eq!(remove_sparse_terms(&tdm, 0.90).unwrap().n_terms(), 0);
        assert_eq!(remove_sparse_terms(&tdm, 1.0).unwrap().n_terms(), 1);
        assert!(remove_sparse_terms(&tdm, 0.0).is_err());
        assert!(remove_sparse_terms(&tdm, 1.5).is_err());
    }

    #[test]
    fn pruning_reindexes_in_order() {
        let tdm = build_tdm(
            &corpus_of(&["a b", "a c", "a b"]),
            &Normalizer::default(),
            TdmFlags::default(),
        )
        .unwrap();
        // df: a=3, b=2, c=1; sparsity 0, 1/3, 2/3
        let pruned = remove_sparse_terms(&tdm, 0.5).unwrap();
        assert_eq!(pruned.vocab().terms(), ["a", "b"]);
        assert_eq!(pruned.row(1), &[(0, 1)]);
    }

    #[test]
    fn filters_neutral_documents() {
        let mut c = corpus_of(&["w", "x", "y", "z"]);
        for (d, s) in c.documents.iter_mut().zip([0, 1, -1, 0]) {
            d.senti_score = Some(s);
        }
        let f = filter_neutral(&c).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.documents[0].text, "x");
        assert_eq!(f.documents[1].text, "y");

        let mut neutral = corpus_of(&["a", "b"]);
        for d in &mut neutral.documents {
            d.senti_score = Some(0);
        }
        assert!(filter_neutral(&neutral).unwrap().is_empty());
        assert_eq!(
            filter_neutral(&corpus_of(&["a"])),
            Err(CorpusError::Unscored(0))
        );
    }

    #[test]
    fn split_is_deterministic() {
        let a = split_train_test(500, 1234, 0.7).unwrap();
        let b = split_train_test(500, 1234, 0.7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.train_count() + a.test_count(), 500);
        assert!((a.p_train + a.p_test - 1.0).abs() < 1e-15);
        assert_ne!(a.labels, split_train_test(500, 1235, 0.7).unwrap().labels);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        assert!(split_train_test(10, 1, 0.0).is_err());
        assert!(split_train_test(10, 1, 1.0).is_err());
    }

    #[test]
    fn split_of_6040_documents_is_near_seventy_percent() {
        // expected 0.7 * 6040 = 4228
        let s = split_train_test(6040, 1234, 0.7).unwrap();
        let train = s.train_count() as f64;
        let sd = (6040.0_f64 * 0.7 * 0.3).sqrt();
        assert!((train - 4228.0).abs() < 4.0 * sd, "{train}");
    }
}
