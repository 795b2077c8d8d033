mod common;

use proptest::prelude::*;

use polsent::normalize::{
    fold_diacritics, normalize, replace_emoticons, tokenize, DiacriticMap, EmoticonTable, NEG_EMOT,
    POS_EMOT,
};

const POLISH: [char; 18] = [
    'ą', 'ć', 'ę', 'ł', 'ń', 'ó', 'ś', 'ź', 'ż', 'Ą', 'Ć', 'Ę', 'Ł', 'Ń', 'Ó', 'Ś', 'Ź', 'Ż',
];

/// Word splitting by a plain character scan, sentinels aside.
fn reference_words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.push(c);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normalize_is_idempotent(x in common::raw_text()) {
        let t = EmoticonTable::default();
        let m = DiacriticMap::polish();
        let once = normalize(&x, &t, &m);
        prop_assert_eq!(normalize(&once, &t, &m), once);
    }

    #[test]
    fn folding_removes_every_polish_letter(x in common::raw_text()) {
        let folded = fold_diacritics(&x);
        prop_assert!(!folded.chars().any(|c| POLISH.contains(&c)));
        prop_assert_eq!(fold_diacritics(&folded), folded.clone());
    }

    #[test]
    fn replacement_leaves_no_emoticon(x in common::raw_text()) {
        let t = EmoticonTable::default();
        let out = replace_emoticons(&x, &t);
        for (e, _) in t.entries() {
            prop_assert!(!out.contains(e.as_str()), "{:?} left in {:?}", e, out);
        }
    }

    #[test]
    fn normalized_text_has_no_uppercase_or_diacritics(x in common::raw_text()) {
        let n = normalize(&x, &EmoticonTable::default(), &DiacriticMap::polish());
        prop_assert!(!n.chars().any(|c| POLISH.contains(&c)));
        prop_assert_eq!(n.to_lowercase(), n.clone());
    }

    #[test]
    fn tokens_are_words_or_sentinels(x in common::raw_text()) {
        let n = normalize(&x, &EmoticonTable::default(), &DiacriticMap::polish());
        for tok in tokenize(&n) {
            prop_assert!(!tok.is_empty());
            let sentinel = tok == POS_EMOT || tok == NEG_EMOT;
            prop_assert!(sentinel || tok.chars().all(char::is_alphanumeric), "{:?}", tok);
        }
    }

    #[test]
    fn tokenizer_matches_character_scan_without_sentinels(x in common::raw_text()) {
        prop_assume!(!x.contains("pos.emot") && !x.contains("neg.emot"));
        let got: Vec<String> = tokenize(&x).into_iter().map(str::to_string).collect();
        prop_assert_eq!(got, reference_words(&x));
    }
}

#[test]
fn punctuation_only_gives_no_tokens() {
    assert!(tokenize("...!?,;").is_empty());
    assert_eq!(
        tokenize("rt @foo: tak, jest!"),
        ["rt", "foo", "tak", "jest"]
    );
}
