//! Lexicon-based sentiment scores and corpus summaries.
//!
//! A document's score is the number of positive-lexicon token occurrences
//! minus the number of negative-lexicon token occurrences, counted over the
//! normalized tokens.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::corpus::{Corpus, SentimentClass};
use crate::lexicon::WordPolarity;
use crate::normalize::Normalizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentimentScore {
    pub value: i64,
    pub pos_matches: u32,
    pub neg_matches: u32,
}

impl SentimentScore {
    pub fn new(pos_matches: u32, neg_matches: u32) -> Self {
        SentimentScore {
            value: i64::from(pos_matches) - i64::from(neg_matches),
            pos_matches,
            neg_matches,
        }
    }

    pub fn class(&self) -> SentimentClass {
        classify_score(self.value)
    }
}

pub fn classify_score(score: i64) -> SentimentClass {
    match score.signum() {
        1 => SentimentClass::Positive,
        -1 => SentimentClass::Negative,
        _ => SentimentClass::Neutral,
    }
}

/// Scores already-normalized tokens.
pub fn score_tokens<S: AsRef<str>>(tokens: &[S], lex: &impl WordPolarity) -> SentimentScore {
    let mut pos = 0;
    let mut neg = 0;
    for t in tokens {
        let t = t.as_ref();
        if lex.is_positive(t) {
            pos += 1;
        } else if lex.is_negative(t) {
            neg += 1;
        }
    }
    SentimentScore::new(pos, neg)
}

pub fn score_document(
    text: &str,
    lex: &impl WordPolarity,
    normalizer: &Normalizer,
) -> SentimentScore {
    score_tokens(&normalizer.tokens(text), lex)
}

/// Fills `senti_score` and `senti_class` on every document.
pub fn score_corpus<L>(corpus: &Corpus, lex: &L, normalizer: &Normalizer) -> Corpus
where
    L: WordPolarity + Sync,
{
    let documents = corpus
        .documents
        .par_iter()
        .map(|doc| {
            let score = score_document(&doc.text, lex, normalizer);
            let mut doc = doc.clone();
            doc.senti_score = Some(score.value);
            doc.senti_class = Some(score.class());
            doc
        })
        .collect();
    Corpus {
        documents,
        provenance: corpus.provenance.clone(),
    }
}

/// Per-candidate descriptive statistics of scores.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSummary {
    pub candidate: String,
    pub tweets: usize,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); NaN for a single tweet.
    pub std_dev: f64,
    pub min: i64,
    pub max: i64,
}

fn summarize(candidate: &str, mut scores: Vec<i64>) -> CandidateSummary {
    scores.sort_unstable();
    let n = scores.len();
    let median = if n % 2 == 1 {
        scores[n / 2] as f64
    } else {
        (scores[n / 2 - 1] as f64 + scores[n / 2] as f64) / 2.0
    };
    let mean = scores.iter().sum::<i64>() as f64 / n as f64;
    let std_dev = if n > 1 {
        let ss: f64 = scores.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    CandidateSummary {
        candidate: candidate.to_string(),
        tweets: n,
        median,
        mean,
        std_dev,
        min: scores[0],
        max: scores[n - 1],
    }
}

/// Scores of a scored corpus grouped by candidate, optionally without
/// zero-score documents. Unscored documents are skipped.
fn scores_by_candidate(corpus: &Corpus, exclude_neutral: bool) -> BTreeMap<&str, Vec<i64>> {
    let mut groups: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for doc in &corpus.documents {
        let Some(score) = doc.senti_score else {
            continue;
        };
        if exclude_neutral && score == 0 {
            continue;
        }
        groups
            .entry(doc.candidate.as_str())
            .or_default()
            .push(score);
    }
    groups
}

/// One summary per candidate, sorted by candidate name. Candidates with no
/// qualifying documents are omitted.
pub fn summarize_by_candidate(corpus: &Corpus, exclude_neutral: bool) -> Vec<CandidateSummary> {
    scores_by_candidate(corpus, exclude_neutral)
        .into_iter()
        .map(|(candidate, scores)| summarize(candidate, scores))
        .collect()
}

/// Integer-binned score counts, overall and per candidate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreHistogram {
    pub bins: BTreeMap<i64, usize>,
    pub per_candidate: BTreeMap<String, BTreeMap<i64, usize>>,
}

impl ScoreHistogram {
    pub fn total(&self) -> usize {
        self.bins.values().sum()
    }

    /// Smallest and largest observed score.
    pub fn range(&self) -> Option<(i64, i64)> {
        let lo = *self.bins.keys().next()?;
        let hi = *self.bins.keys().next_back()?;
        Some((lo, hi))
    }
}

pub fn histogram(corpus: &Corpus) -> ScoreHistogram {
    let mut hist = ScoreHistogram::default();
    for doc in &corpus.documents {
        let Some(score) = doc.senti_score else {
            continue;
        };
        *hist.bins.entry(score).or_default() += 1;
        *hist
            .per_candidate
            .entry(doc.candidate.clone())
            .or_default()
            .entry(score)
            .or_default() += 1;
    }
    hist
}
