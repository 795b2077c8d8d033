#![allow(dead_code)]

use proptest::prelude::*;

use polsent::classifiers::{FeatureVector, LabeledSet};
use polsent::corpus::{Corpus, Document, SentimentClass};
use polsent::normalize::EmoticonTable;
use polsent::scoring::classify_score;

pub const POLISH_WORDS: &[&str] = &[
    "Zażółć",
    "gęślą",
    "jaźń",
    "ŁÓDŹ",
    "Świetny",
    "źle",
    "dobry",
    "ZŁY",
    "Kraków",
    "wybory",
    "Prezydent",
    "mówi",
    "będzie",
    "ąćęłńóśźż",
    "ĄĆĘŁŃÓŚŹŻ",
    "pos.emot",
    "neg.emot",
    "rt",
];

pub const FRAGMENTS: &[&str] = &[
    " ",
    "  ",
    "\t",
    "\n",
    ",",
    ".",
    "!",
    "?",
    "@",
    "#",
    ":",
    "...",
    "https://t.co/x1",
    "@user_1",
    "#wybory2015",
    "😀",
    "🇵🇱",
    "👍🏽",
    "é",
    "ß",
    "İ",
    "Σ",
    "ς",
    "日本",
    "123",
    "x",
    "d",
    "8",
    "-",
    "'",
    "^",
    "_",
    "<",
    ">",
    "/",
    "\\",
];

/// Raw texts mixing Polish words, emoji, punctuation and emoticons in mixed
/// case.
pub fn raw_text() -> impl Strategy<Value = String> {
    let table = EmoticonTable::default();
    let mut emoticons: Vec<String> = table.entries().iter().map(|(e, _)| e.clone()).collect();
    emoticons.extend(table.entries().iter().map(|(e, _)| e.to_uppercase()));
    let piece = prop_oneof![
        3 => prop::sample::select(POLISH_WORDS).prop_map(str::to_string),
        3 => prop::sample::select(FRAGMENTS).prop_map(str::to_string),
        3 => prop::sample::select(emoticons),
        1 => any::<char>().prop_map(|c| c.to_string()),
    ];
    prop::collection::vec(piece, 0..24).prop_map(|parts| parts.concat())
}

pub fn small_word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g", "h", "ij", "kl"])
        .prop_map(str::to_string)
}

/// Word lists for random corpora.
pub fn word_docs(max_docs: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(
        prop::collection::vec(small_word(), 0..max_len),
        1..=max_docs,
    )
}

pub fn corpus_from_words(docs: &[Vec<String>]) -> Corpus {
    Corpus::new(
        docs.iter()
            .map(|w| Document::new(w.join(" "), "X", "C"))
            .collect(),
    )
}

pub fn scored_doc(text: &str, candidate: &str, score: i64) -> Document {
    let mut d = Document::new(text, "X", candidate);
    d.senti_score = Some(score);
    d.senti_class = Some(classify_score(score));
    d
}

/// Binary labeled sets with `n_features` columns.
pub fn binary_set(
    max_docs: usize,
    n_features: usize,
    n_classes: usize,
) -> impl Strategy<Value = LabeledSet> {
    let doc = (
        prop::collection::vec(any::<bool>(), n_features),
        0..n_classes,
    );
    prop::collection::vec(doc, 2..=max_docs)
        .prop_filter("needs two classes", |docs| {
            docs.iter().any(|d| d.1 != docs[0].1)
        })
        .prop_map(move |docs| {
            let features = docs
                .iter()
                .map(|(bits, _)| {
                    FeatureVector::binary(
                        bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
                    )
                })
                .collect();
            let labels = docs.iter().map(|d| d.1).collect();
            let names = (0..n_classes).map(|c| format!("c{c}")).collect();
            LabeledSet::new(features, labels, names, n_features).unwrap()
        })
}

pub fn class_name(c: SentimentClass) -> String {
    c.to_string()
}

/// Class posteriors by direct Bernoulli enumeration with plain products.
pub fn nb_posterior(data: &LabeledSet, alpha: f64, x: &FeatureVector) -> Vec<f64> {
    let n = data.len() as f64;
    let mut joint = vec![0.0; data.n_classes()];
    for (c, j) in joint.iter_mut().enumerate() {
        let members: Vec<&FeatureVector> = data
            .features
            .iter()
            .zip(&data.labels)
            .filter(|(_, &y)| y == c)
            .map(|(f, _)| f)
            .collect();
        let n_c = members.len() as f64;
        let mut p = n_c / n;
        for t in 0..data.n_features {
            let df = members.iter().filter(|f| f.get(t) != 0.0).count() as f64;
            let theta = (df + alpha) / (n_c + 2.0 * alpha);
            p *= if x.get(t) != 0.0 { theta } else { 1.0 - theta };
        }
        *j = p;
    }
    let z: f64 = joint.iter().sum();
    joint.iter().map(|j| j / z).collect()
}

pub fn all_binary_vectors(n_features: usize) -> Vec<FeatureVector> {
    (0..1u32 << n_features)
        .map(|mask| FeatureVector::binary((0..n_features).filter(|t| mask >> t & 1 == 1)))
        .collect()
}

/// Terms kept by scanning each term's document frequency directly from the
/// word lists: keep iff (n - df) / n < sparse. First-seen order.
pub fn naive_kept(docs: &[Vec<String>], sparse: f64) -> Vec<String> {
    let n = docs.len();
    let mut order: Vec<String> = Vec::new();
    for w in docs.iter().flatten() {
        if !order.contains(w) {
            order.push(w.clone());
        }
    }
    order
        .into_iter()
        .filter(|term| {
            let df = docs.iter().filter(|d| d.contains(term)).count();
            ((n - df) as f64 / n as f64) < sparse
        })
        .collect()
}
