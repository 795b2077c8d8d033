mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;

use polsent::corpus::{build_tdm, remove_sparse_terms, split_train_test, SplitLabel, TdmFlags};
use polsent::normalize::Normalizer;

const GRID: [f64; 5] = [0.90, 0.95, 0.99, 0.995, 1.0];

fn sparse_value() -> impl Strategy<Value = f64> {
    prop_oneof![prop::sample::select(GRID.to_vec()), 0.01f64..=1.0]
}

proptest! {
    #[test]
    fn pruning_matches_df_scan(docs in common::word_docs(20, 8), sparse in sparse_value()) {
        let tdm = build_tdm(&common::corpus_from_words(&docs), &Normalizer::default(), TdmFlags::default()).unwrap();
        let pruned = remove_sparse_terms(&tdm, sparse).unwrap();
        prop_assert_eq!(pruned.vocab().terms().to_vec(), common::naive_kept(&docs, sparse));
        // surviving counts are untouched
        for (d, words) in docs.iter().enumerate() {
            for &(col, count) in pruned.row(d) {
                let term = pruned.vocab().term(col);
                let expected = words.iter().filter(|w| w.as_str() == term).count() as u32;
                prop_assert_eq!(count, expected);
            }
        }
    }

    #[test]
    fn pruning_is_monotone_and_idempotent(docs in common::word_docs(20, 8)) {
        let tdm = build_tdm(&common::corpus_from_words(&docs), &Normalizer::default(), TdmFlags::default()).unwrap();
        let mut prev: Option<BTreeSet<String>> = None;
        for s in GRID {
            let pruned = remove_sparse_terms(&tdm, s).unwrap();
            let again = remove_sparse_terms(&pruned, s).unwrap();
            prop_assert_eq!(again.vocab().terms(), pruned.vocab().terms());
            prop_assert_eq!(again.rows(), pruned.rows());
            let kept: BTreeSet<String> = pruned.vocab().terms().iter().cloned().collect();
            if let Some(p) = &prev {
                prop_assert!(p.is_subset(&kept));
            }
            prev = Some(kept);
        }
    }

    #[test]
    fn tdm_conserves_token_counts(texts in prop::collection::vec(common::raw_text(), 1..15)) {
        let corpus = polsent::Corpus::new(texts.iter().map(|t| polsent::Document::new(t.clone(), "", "")).collect());
        let norm = Normalizer::default();
        let tdm = build_tdm(&corpus, &norm, TdmFlags::default()).unwrap();
        let tokens: usize = texts.iter().map(|t| norm.tokens(t).len()).sum();
        prop_assert_eq!(tdm.total_count(), tokens as u64);
        for (d, t) in texts.iter().enumerate() {
            let mut counts: HashMap<String, u32> = HashMap::new();
            for tok in norm.tokens(t) {
                *counts.entry(tok).or_default() += 1;
            }
            for (term, c) in counts {
                let col = tdm.vocab().get(&term).unwrap();
                prop_assert_eq!(tdm.get(d, col), c);
            }
        }
    }

    #[test]
    fn split_partitions_documents(n in 1usize..500, seed in any::<u64>(), p in 0.05f64..0.95) {
        let split = split_train_test(n, seed, p).unwrap();
        prop_assert_eq!(split.labels.len(), n);
        let train = split.indices(SplitLabel::Train);
        let test = split.indices(SplitLabel::Test);
        prop_assert_eq!(train.len() + test.len(), n);
        let all: BTreeSet<usize> = train.iter().chain(&test).copied().collect();
        prop_assert_eq!(all.len(), n);
        prop_assert_eq!(split_train_test(n, seed, p).unwrap(), split);
    }
}
