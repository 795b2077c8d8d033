mod common;

use std::collections::BTreeSet;
use std::fs;

use proptest::prelude::*;
use tempfile::TempDir;

use polsent::corpus::{Corpus, SentimentClass};
use polsent::lexicon::{load_lexicon, LexiconError, SentimentLexicon};
use polsent::normalize::Normalizer;
use polsent::scoring::{classify_score, score_document, summarize_by_candidate};

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,6}".prop_filter("not a sentinel", |w| w != "pos" && w != "neg")
}

fn word_sets() -> impl Strategy<Value = (BTreeSet<String>, BTreeSet<String>)> {
    (
        prop::collection::btree_set(word(), 0..12),
        prop::collection::btree_set(word(), 0..12),
    )
        .prop_map(|(p, n)| {
            let n = n.difference(&p).cloned().collect();
            (p, n)
        })
}

fn lexicon_of(pos: &BTreeSet<String>, neg: &BTreeSet<String>) -> SentimentLexicon {
    let mut p: Vec<String> = pos.iter().cloned().collect();
    let mut n: Vec<String> = neg.iter().cloned().collect();
    p.push("pos.emot".into());
    n.push("neg.emot".into());
    SentimentLexicon::from_words(p, n).unwrap()
}

/// Documents built from lexicon words, filler words and emoticons.
fn doc_from(pos: &BTreeSet<String>, neg: &BTreeSet<String>) -> impl Strategy<Value = String> {
    let mut vocab: Vec<String> = pos.iter().chain(neg).cloned().collect();
    vocab.extend(["filler", "inne", ":)", ":(", "<3", "ZŁY", "Dobry!"].map(String::from));
    prop::collection::vec(prop::sample::select(vocab), 0..15).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn overlapping_files_always_fail((pos, neg) in word_sets(), shared in word()) {
        let dir = TempDir::new().unwrap();
        let mut p: Vec<String> = pos.iter().cloned().collect();
        let mut n: Vec<String> = neg.iter().cloned().collect();
        p.extend(["pos.emot".to_string(), shared.clone()]);
        n.extend(["neg.emot".to_string(), shared.clone()]);
        fs::write(dir.path().join("p.txt"), p.join("\n")).unwrap();
        fs::write(dir.path().join("n.txt"), n.join("\n")).unwrap();
        match load_lexicon(dir.path().join("p.txt"), dir.path().join("n.txt")) {
            Err(LexiconError::Overlap(words)) => prop_assert!(words.contains(&shared)),
            other => prop_assert!(false, "expected overlap error, got {:?}", other),
        }
    }

    #[test]
    fn lexicon_round_trips_through_files((pos, neg) in word_sets()) {
        let lex = lexicon_of(&pos, &neg);
        let dir = TempDir::new().unwrap();
        let (p, n) = (dir.path().join("p.txt"), dir.path().join("n.txt"));
        lex.write(&p, &n).unwrap();
        let back = load_lexicon(&p, &n).unwrap();
        prop_assert_eq!(back.positive(), lex.positive());
        prop_assert_eq!(back.negative(), lex.negative());
    }

    #[test]
    fn scoring_properties(((pos, neg), docs) in word_sets().prop_flat_map(|(p, n)| {
        let docs = prop::collection::vec(doc_from(&p, &n), 1..20);
        (Just((p, n)), docs)
    })) {
        let lex = lexicon_of(&pos, &neg);
        let norm = Normalizer::default();
        for text in &docs {
            let s = score_document(text, &lex, &norm);
            let swapped = score_document(text, &lex.swapped(), &norm);
            prop_assert_eq!(swapped.value, -s.value);
            let expected_class = match s.class() {
                SentimentClass::Positive => SentimentClass::Negative,
                SentimentClass::Negative => SentimentClass::Positive,
                SentimentClass::Neutral => SentimentClass::Neutral,
            };
            prop_assert_eq!(swapped.class(), expected_class);

            let tokens = norm.tokens(text);
            let p = tokens.iter().filter(|t| lex.positive().contains(*t)).count() as i64;
            let n = tokens.iter().filter(|t| lex.negative().contains(*t)).count() as i64;
            prop_assert_eq!(s.value, p - n);
            prop_assert!(s.value.unsigned_abs() as usize <= tokens.len());

            if let Some(w) = pos.iter().next() {
                let more = score_document(&format!("{text} {w}"), &lex, &norm);
                prop_assert_eq!(more.value, s.value + 1);
            }
        }
    }

    #[test]
    fn summaries_cover_every_document(scores in prop::collection::vec((0usize..4, -3i64..4), 1..60), exclude in any::<bool>()) {
        let corpus = Corpus::new(
            scores.iter().map(|&(c, s)| common::scored_doc("t", &format!("cand{c}"), s)).collect(),
        );
        let total: usize = summarize_by_candidate(&corpus, exclude).iter().map(|s| s.tweets).sum();
        let expected = scores.iter().filter(|(_, s)| !exclude || *s != 0).count();
        prop_assert_eq!(total, expected);
    }
}

#[test]
fn classify_score_is_sign_rule() {
    for s in -10..=10 {
        let expected = if s > 0 {
            SentimentClass::Positive
        } else if s < 0 {
            SentimentClass::Negative
        } else {
            SentimentClass::Neutral
        };
        assert_eq!(classify_score(s), expected, "score {s}");
    }
}
