//! Text normalization: lowercasing, Polish diacritic folding, emoticon
//! substitution and word tokenization.
//!
//! The pipeline order is fixed: lowercase, then fold diacritics, then replace
//! emoticons with the sentinel words [`POS_EMOT`] / [`NEG_EMOT`].

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentinel word substituted for positive emoticons.
pub const POS_EMOT: &str = "pos.emot";
/// Sentinel word substituted for negative emoticons.
pub const NEG_EMOT: &str = "neg.emot";

const DEFAULT_EMOTICONS: &str = include_str!("../data/emoticons.tsv");

const POLISH_LETTERS: [(char, char); 18] = [
    ('ą', 'a'),
    ('ć', 'c'),
    ('ę', 'e'),
    ('ł', 'l'),
    ('ń', 'n'),
    ('ó', 'o'),
    ('ś', 's'),
    ('ź', 'z'),
    ('ż', 'z'),
    ('Ą', 'a'),
    ('Ć', 'c'),
    ('Ę', 'e'),
    ('Ł', 'l'),
    ('Ń', 'n'),
    ('Ó', 'o'),
    ('Ś', 's'),
    ('Ź', 'z'),
    ('Ż', 'z'),
];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read emoticon table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("emoticon table line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Ordered map from Polish-specific letters to basic Latin replacements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiacriticMap {
    entries: Vec<(char, char)>,
}

impl Default for DiacriticMap {
    fn default() -> Self {
        Self::polish()
    }
}

impl DiacriticMap {
    /// The 18-entry map (9 lowercase, 9 uppercase letters).
    pub fn polish() -> Self {
        DiacriticMap {
            entries: POLISH_LETTERS.to_vec(),
        }
    }

    pub fn entries(&self) -> &[(char, char)] {
        &self.entries
    }

    pub fn contains(&self, c: char) -> bool {
        self.lookup(c).is_some()
    }

    fn lookup(&self, c: char) -> Option<char> {
        self.entries
            .iter()
            .find(|(from, _)| *from == c)
            .map(|(_, to)| *to)
    }

    pub fn fold(&self, text: &str) -> String {
        text.chars().map(|c| self.lookup(c).unwrap_or(c)).collect()
    }
}

/// Folds the 18 Polish diacritic letters to basic Latin; everything else is
/// preserved in order.
pub fn fold_diacritics(text: &str) -> String {
    DiacriticMap::polish().fold(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl Polarity {
    pub fn sentinel(self) -> &'static str {
        match self {
            Polarity::Positive => POS_EMOT,
            Polarity::Negative => NEG_EMOT,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "pos",
            Polarity::Negative => "neg",
        })
    }
}

/// Positive and negative emoticon literals.
///
/// Entries are stored in file order; matching tries them longest first, so
/// `":-)"` wins over any shorter entry starting at the same position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmoticonTable {
    entries: Vec<(String, Polarity)>,
    /// Indices into `entries`, longest first, stable on file order.
    match_order: Vec<usize>,
}

impl Default for EmoticonTable {
    fn default() -> Self {
        Self::parse(DEFAULT_EMOTICONS).expect("bundled emoticon table is valid")
    }
}

impl EmoticonTable {
    pub fn new(entries: Vec<(String, Polarity)>) -> Result<Self, TableError> {
        for (i, (emoticon, _)) in entries.iter().enumerate() {
            validate_emoticon(emoticon).map_err(|message| TableError::Format {
                line: i + 1,
                message,
            })?;
            if entries[..i].iter().any(|(prev, _)| prev == emoticon) {
                return Err(TableError::Format {
                    line: i + 1,
                    message: format!("duplicate emoticon {emoticon:?}"),
                });
            }
        }
        let mut match_order: Vec<usize> = (0..entries.len()).collect();
        match_order.sort_by_key(|&i| std::cmp::Reverse(entries[i].0.len()));
        Ok(EmoticonTable {
            entries,
            match_order,
        })
    }

    /// Parses the `<emoticon>\t<pos|neg>` format; `#` lines and blank lines
    /// are skipped.
    pub fn parse(source: &str) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (emoticon, tag) = line.split_once('\t').ok_or_else(|| TableError::Format {
                line: line_no,
                message: "expected <emoticon><TAB><pos|neg>".to_string(),
            })?;
            let polarity = match tag.trim() {
                "pos" => Polarity::Positive,
                "neg" => Polarity::Negative,
                other => {
                    return Err(TableError::Format {
                        line: line_no,
                        message: format!("unknown polarity {other:?}"),
                    })
                }
            };
            validate_emoticon(emoticon).map_err(|message| TableError::Format {
                line: line_no,
                message,
            })?;
            if entries.iter().any(|(e, _)| e == emoticon) {
                return Err(TableError::Format {
                    line: line_no,
                    message: format!("duplicate emoticon {emoticon:?}"),
                });
            }
            entries.push((emoticon.to_string(), polarity));
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TableError> {
        let path = path.as_ref();
        let source = fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&source)
    }

    pub fn entries(&self) -> &[(String, Polarity)] {
        &self.entries
    }

    pub fn positive(&self) -> impl Iterator<Item = &str> {
        self.with_polarity(Polarity::Positive)
    }

    pub fn negative(&self) -> impl Iterator<Item = &str> {
        self.with_polarity(Polarity::Negative)
    }

    fn with_polarity(&self, polarity: Polarity) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |(_, p)| *p == polarity)
            .map(|(e, _)| e.as_str())
    }

    fn longest_match(&self, haystack: &str) -> Option<(usize, Polarity)> {
        self.match_order.iter().find_map(|&i| {
            let (emoticon, polarity) = &self.entries[i];
            haystack
                .starts_with(emoticon.as_str())
                .then_some((emoticon.len(), *polarity))
        })
    }

    /// Replaces every emoticon with a space-padded sentinel word.
    pub fn replace(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len() + 16);
        let mut rest = text;
        while let Some(c) = rest.chars().next() {
            match self.longest_match(rest) {
                Some((len, polarity)) => {
                    out.push(' ');
                    out.push_str(polarity.sentinel());
                    out.push(' ');
                    rest = &rest[len..];
                }
                None => {
                    out.push(c);
                    rest = &rest[c.len_utf8()..];
                }
            }
        }
        out
    }
}

fn validate_emoticon(emoticon: &str) -> Result<(), String> {
    if emoticon.is_empty() {
        return Err("empty emoticon".to_string());
    }
    if emoticon.chars().any(char::is_whitespace) {
        return Err(format!("emoticon {emoticon:?} contains whitespace"));
    }
    if emoticon.to_lowercase() != emoticon {
        return Err(format!(
            "emoticon {emoticon:?} has uppercase letters and would never match lowercased text"
        ));
    }
    if DiacriticMap::polish().fold(emoticon) != emoticon {
        return Err(format!("emoticon {emoticon:?} contains Polish diacritics"));
    }
    if POS_EMOT.contains(emoticon) || NEG_EMOT.contains(emoticon) {
        return Err(format!(
            "emoticon {emoticon:?} occurs inside a sentinel word"
        ));
    }
    Ok(())
}

/// Replaces every table emoticon with `" pos.emot "` or `" neg.emot "`.
pub fn replace_emoticons(text: &str, table: &EmoticonTable) -> String {
    table.replace(text)
}

/// Lowercases, folds diacritics and substitutes emoticons, in that order.
pub fn normalize(text: &str, table: &EmoticonTable, map: &DiacriticMap) -> String {
    table.replace(&map.fold(&text.to_lowercase()))
}

/// Splits text into maximal runs of letters and digits. The two sentinel
/// words are kept whole even though they contain a dot.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while let Some(c) = text[pos..].chars().next() {
        let rest = &text[pos..];
        if let Some(len) = sentinel_at(rest) {
            tokens.push(&rest[..len]);
            pos += len;
        } else if c.is_alphanumeric() {
            let len = rest
                .find(|c: char| !c.is_alphanumeric())
                .unwrap_or(rest.len());
            tokens.push(&rest[..len]);
            pos += len;
        } else {
            pos += c.len_utf8();
        }
    }
    tokens
}

/// Length of the sentinel word at the start of `rest`, if it stands alone.
fn sentinel_at(rest: &str) -> Option<usize> {
    [POS_EMOT, NEG_EMOT].iter().find_map(|s| {
        let after = rest.strip_prefix(s)?;
        match after.chars().next() {
            Some(c) if c.is_alphanumeric() => None,
            _ => Some(s.len()),
        }
    })
}

/// Bundles the emoticon table and diacritic map used throughout a pipeline.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Normalizer {
    pub emoticons: EmoticonTable,
    pub diacritics: DiacriticMap,
}

impl Normalizer {
    pub fn new(emoticons: EmoticonTable) -> Self {
        Normalizer {
            emoticons,
            diacritics: DiacriticMap::polish(),
        }
    }

    pub fn normalize(&self, text: &str) -> String {
        normalize(text, &self.emoticons, &self.diacritics)
    }

    /// Normalized tokens of `text`, owned.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        let normalized = self.normalize(text);
        tokenize(&normalized)
            .into_iter()
            .map(str::to_owned)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_single_letters() {
        assert_eq!(fold_diacritics("ą"), "a");
        assert_eq!(fold_diacritics("ż"), "z");
        assert_eq!(fold_diacritics("abc xyz 123"), "abc xyz 123");
    }

    #[test]
    fn folds_pangram() {
        assert_eq!(fold_diacritics("zażółć gęślą"), "zazolc gesla");
        assert_eq!(fold_diacritics("ZAŻÓŁĆ"), "ZAzolc");
    }

    #[test]
    fn map_covers_eighteen_letters() {
        let map = DiacriticMap::polish();
        assert_eq!(map.entries().len(), 18);
        for (_, to) in map.entries() {
            assert!(to.is_ascii_lowercase());
        }
        let all: String = map.entries().iter().map(|(from, _)| *from).collect();
        assert_eq!(map.fold(&map.fold(&all)), map.fold(&all));
    }

    #[test]
    fn default_table_has_expected_counts() {
        let table = EmoticonTable::default();
        assert_eq!(table.positive().count(), 18);
        assert_eq!(table.negative().count(), 22);
    }

    #[test]
    fn replaces_emoticons_with_padding() {
        let table = EmoticonTable::default();
        assert_eq!(
            replace_emoticons("dobra robota :)", &table),
            "dobra robota  pos.emot "
        );
        assert_eq!(
            replace_emoticons("przegrana :(", &table),
            "przegrana  neg.emot "
        );
        assert_eq!(
            replace_emoticons("bez emotikonow", &table),
            "bez emotikonow"
        );
    }

    #[test]
    fn longest_emoticon_wins() {
        let table = EmoticonTable::new(vec![
            (":-".to_string(), Polarity::Negative),
            (":-)".to_string(), Polarity::Positive),
        ])
        .unwrap();
        assert_eq!(table.replace("a:-)"), "a pos.emot ");
        assert_eq!(table.replace(":-("), " neg.emot (");
    }

    #[test]
    fn normalize_composes_stages() {
        let n = Normalizer::default();
        assert_eq!(n.normalize("Zły Dzień :("), "zly dzien  neg.emot ");
        assert_eq!(n.normalize(""), "");
        assert_eq!(n.normalize("OK"), "ok");
        // uppercase emoticon is lowercased before matching
        assert_eq!(n.normalize("Super :D"), "super  pos.emot ");
    }

    #[test]
    fn urls_survive_normalization() {
        let n = Normalizer::default();
        assert_eq!(n.normalize("http://t.co/x"), "http://t.co/x");
    }

    #[test]
    fn tokenizes_words() {
        assert_eq!(
            tokenize("rt @foo: tak, jest!"),
            vec!["rt", "foo", "tak", "jest"]
        );
        assert_eq!(tokenize("pos.emot"), vec!["pos.emot"]);
        assert!(tokenize("...").is_empty());
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn sentinel_only_atomic_at_word_start() {
        assert_eq!(tokenize("a  pos.emot  b"), vec!["a", "pos.emot", "b"]);
        assert_eq!(tokenize("xpos.emot"), vec!["xpos", "emot"]);
        assert_eq!(tokenize("pos.emotka"), vec!["pos", "emotka"]);
        assert_eq!(tokenize("neg.emot,pos.emot"), vec!["neg.emot", "pos.emot"]);
    }

    #[test]
    fn tokenizes_unicode_letters() {
        assert_eq!(tokenize("ünïcode 42x"), vec!["ünïcode", "42x"]);
    }

    #[test]
    fn table_rejects_bad_entries() {
        assert!(EmoticonTable::parse(":D\tpos\n").is_err());
        assert!(EmoticonTable::parse(":)\tmeh\n").is_err());
        assert!(EmoticonTable::parse(":)\tpos\n:)\tneg\n").is_err());
        assert!(EmoticonTable::parse("no tab here\n").is_err());
        assert!(EmoticonTable::parse(".\tpos\n").is_err());
        let ok = EmoticonTable::parse("# comment\n\n:)\tpos\n:(\tneg\n").unwrap();
        assert_eq!(ok.entries().len(), 2);
    }
}
