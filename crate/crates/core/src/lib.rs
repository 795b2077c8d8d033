//! Lexicon-based and supervised sentiment analysis of short Polish texts.
//!
//! The pipeline runs normalize → score → build a document-term matrix →
//! train/evaluate classifiers. Each stage lives in its own module and can be
//! used on its own.

pub mod classifiers;
pub mod corpus;
pub mod evaluation;
pub mod ingest;
pub mod lexicon;
pub mod model;
pub mod normalize;
pub mod report;
pub mod scoring;

pub use corpus::{Corpus, Document, SentimentClass};
pub use lexicon::SentimentLexicon;
pub use normalize::Normalizer;
