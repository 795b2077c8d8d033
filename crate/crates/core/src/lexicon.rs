//! Positive/negative opinion lexicons.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::normalize::{DiacriticMap, NEG_EMOT, POS_EMOT};

const DEMO_POSITIVE: &str = include_str!("../data/opinion-lexicon-Polish/positive-words.txt");
const DEMO_NEGATIVE: &str = include_str!("../data/opinion-lexicon-Polish/negative-words.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read lexicon file {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("words listed as both positive and negative: {}", .0.join(", "))]
    Overlap(Vec<String>),
    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon is missing the sentinel word {0:?}")]
    MissingSentinel(&'static str),
}

/// Two disjoint word sets. `pos.emot` is always positive and `neg.emot`
/// always negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentimentLexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
    source_paths: Option<(PathBuf, PathBuf)>,
}

impl SentimentLexicon {
    /// The small illustrative lexicon shipped with the crate.
    pub fn demo() -> Self {
        let pos = parse_words(DEMO_POSITIVE, Path::new("positive-words.txt"))
            .expect("bundled lexicon is valid");
        let neg = parse_words(DEMO_NEGATIVE, Path::new("negative-words.txt"))
            .expect("bundled lexicon is valid");
        Self::checked(pos, neg, None).expect("bundled lexicon is valid")
    }

    pub fn from_words<I, J, S, T>(positive: I, negative: J) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let positive: BTreeSet<String> = positive.into_iter().map(Into::into).collect();
        let negative: BTreeSet<String> = negative.into_iter().map(Into::into).collect();
        for word in positive.iter().chain(&negative) {
            if let Err(message) = validate_word(word) {
                return Err(LexiconError::Format {
                    path: PathBuf::new(),
                    line: 0,
                    message,
                });
            }
        }
        Self::checked(positive, negative, None)
    }

    fn checked(
        positive: BTreeSet<String>,
        negative: BTreeSet<String>,
        source_paths: Option<(PathBuf, PathBuf)>,
    ) -> Result<Self, LexiconError> {
        let overlap: Vec<String> = positive.intersection(&negative).cloned().collect();
        if !overlap.is_empty() {
            return Err(LexiconError::Overlap(overlap));
        }
        if !positive.contains(POS_EMOT) {
            return Err(LexiconError::MissingSentinel(POS_EMOT));
        }
        if !negative.contains(NEG_EMOT) {
            return Err(LexiconError::MissingSentinel(NEG_EMOT));
        }
        Ok(SentimentLexicon {
            positive,
            negative,
            source_paths,
        })
    }

    pub fn positive(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeSet<String> {
        &self.negative
    }

    pub fn source_paths(&self) -> Option<(&Path, &Path)> {
        self.source_paths
            .as_ref()
            .map(|(p, n)| (p.as_path(), n.as_path()))
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }

    /// The same lexicon with the two lists exchanged. Sentinels move too, so
    /// the result is only usable as a scoring oracle, not reloadable from disk.
    pub fn swapped(&self) -> SwappedLexicon<'_> {
        SwappedLexicon(self)
    }

    /// Writes both lists, one word per line in sorted order.
    pub fn write(&self, pos_file: impl AsRef<Path>, neg_file: impl AsRef<Path>) -> io::Result<()> {
        fs::write(pos_file, join_lines(&self.positive))?;
        fs::write(neg_file, join_lines(&self.negative))
    }
}

/// Read-only view with positive and negative roles exchanged.
#[derive(Debug, Clone, Copy)]
pub struct SwappedLexicon<'a>(&'a SentimentLexicon);

/// Word-membership queries used by the scorer.
pub trait WordPolarity {
    fn is_positive(&self, word: &str) -> bool;
    fn is_negative(&self, word: &str) -> bool;
}

impl WordPolarity for SentimentLexicon {
    fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }
    fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }
}

impl WordPolarity for SwappedLexicon<'_> {
    fn is_positive(&self, word: &str) -> bool {
        self.0.negative.contains(word)
    }
    fn is_negative(&self, word: &str) -> bool {
        self.0.positive.contains(word)
    }
}

fn join_lines(words: &BTreeSet<String>) -> String {
    let mut out = String::new();
    for w in words {
        out.push_str(w);
        out.push('\n');
    }
    out
}

fn validate_word(word: &str) -> Result<(), String> {
    if word.is_empty() {
        return Err("empty word".to_string());
    }
    if word.chars().any(char::is_whitespace) {
        return Err(format!("word {word:?} contains whitespace"));
    }
    if word.chars().any(char::is_uppercase) {
        return Err(format!("word {word:?} contains uppercase letters"));
    }
    let map = DiacriticMap::polish();
    if word.chars().any(|c| map.contains(c)) {
        return Err(format!(
            "word {word:?} contains Polish diacritics; write it in basic Latin"
        ));
    }
    Ok(())
}

/// One word per line, skipping blank lines and `#` comments. Duplicate
/// lines collapse.
fn parse_words(source: &str, path: &Path) -> Result<BTreeSet<String>, LexiconError> {
    let mut set = BTreeSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        validate_word(line).map_err(|message| LexiconError::Format {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        })?;
        set.insert(line.to_string());
    }
    Ok(set)
}

fn read_word_file(path: &Path) -> Result<BTreeSet<String>, LexiconError> {
    if !path.exists() {
        return Err(LexiconError::MissingFile(path.to_path_buf()));
    }
    let source = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_words(&source, path)
}

pub fn load_lexicon(
    pos_file: impl AsRef<Path>,
    neg_file: impl AsRef<Path>,
) -> Result<SentimentLexicon, LexiconError> {
    let (pos_file, neg_file) = (pos_file.as_ref(), neg_file.as_ref());
    let positive = read_word_file(pos_file)?;
    let negative = read_word_file(neg_file)?;
    SentimentLexicon::checked(
        positive,
        negative,
        Some((pos_file.to_path_buf(), neg_file.to_path_buf())),
    )
}

/// `(positive count, negative count)`.
pub fn lexicon_stats(lex: &SentimentLexicon) -> (usize, usize) {
    (lex.positive.len(), lex.negative.len())
}

/// Words that break alphabetical order in a lexicon file, as
/// `(line number, word)` pairs. Used by the `--check-sorted` lint.
pub fn unsorted_entries(path: impl AsRef<Path>) -> Result<Vec<(usize, String)>, LexiconError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(LexiconError::MissingFile(path.to_path_buf()));
    }
    let source = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut prev: Option<&str> = None;
    let mut out = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(p) = prev {
            if line < p {
                out.push((idx + 1, line.to_string()));
            }
        }
        prev = Some(line);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn write_pair(dir: &TempDir, pos: &str, neg: &str) -> (PathBuf, PathBuf) {
        let p = dir.path().join("positive-words.txt");
        let n = dir.path().join("negative-words.txt");
        fs::write(&p, pos).unwrap();
        fs::write(&n, neg).unwrap();
        (p, n)
    }

    #[test]
    fn loads_small_lexicon() {
        let dir = TempDir::new().unwrap();
        let (p, n) = write_pair(&dir, "dobry\npos.emot\n", "zly\nneg.emot\n");
        let lex = load_lexicon(&p, &n).unwrap();
        assert_eq!(lexicon_stats(&lex), (2, 2));
        assert!(lex.is_positive("dobry"));
        assert!(lex.is_negative("neg.emot"));
    }

    #[test]
    fn sentinel_only_lexicon() {
        let lex = SentimentLexicon::from_words([POS_EMOT], [NEG_EMOT]).unwrap();
        assert_eq!(lexicon_stats(&lex), (1, 1));
    }

    #[test]
    fn reports_overlap() {
        let dir = TempDir::new().unwrap();
        let (p, n) = write_pair(&dir, "dobry\npos.emot\n", "dobry\nneg.emot\n");
        match load_lexicon(&p, &n) {
            Err(LexiconError::Overlap(words)) => assert_eq!(words, vec!["dobry"]),
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_words() {
        let dir = TempDir::new().unwrap();
        for bad in ["Dobry\n", "dobry dzien\n", "zły\n"] {
            let (p, n) = write_pair(&dir, &format!("pos.emot\n{bad}"), "neg.emot\n");
            assert!(
                matches!(
                    load_lexicon(&p, &n),
                    Err(LexiconError::Format { line: 2, .. })
                ),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn missing_file() {
        let dir = TempDir::new().unwrap();
        let err = load_lexicon(dir.path().join("nope.txt"), dir.path().join("nope2.txt"));
        assert!(matches!(err, Err(LexiconError::MissingFile(_))));
    }

    #[test]
    fn comments_blanks_and_duplicates() {
        let dir = TempDir::new().unwrap();
        let (p, n) = write_pair(
            &dir,
            "# header\n\ndobry\ndobry\npos.emot\r\n",
            "neg.emot\nzly\n",
        );
        let lex = load_lexicon(&p, &n).unwrap();
        assert_eq!(lexicon_stats(&lex), (2, 2));
    }

    #[test]
    fn requires_sentinels() {
        let dir = TempDir::new().unwrap();
        let (p, n) = write_pair(&dir, "dobry\n", "zly\nneg.emot\n");
        assert!(matches!(
            load_lexicon(&p, &n),
            Err(LexiconError::MissingSentinel(POS_EMOT))
        ));
    }

    #[test]
    fn sorted_lint() {
        let dir = TempDir::new().unwrap();
        let (p, _) = write_pair(&dir, "# c\nb\na\nc\n", "");
        assert_eq!(unsorted_entries(&p).unwrap(), vec![(3, "a".to_string())]);
    }

    #[test]
    fn write_then_reload() {
        let dir = TempDir::new().unwrap();
        let lex = SentimentLexicon::from_words(["dobry", "pos.emot"], ["zly", "neg.emot"]).unwrap();
        let p = dir.path().join("p.txt");
        let n = dir.path().join("n.txt");
        lex.write(&p, &n).unwrap();
        let back = load_lexicon(&p, &n).unwrap();
        assert_eq!(back.positive(), lex.positive());
        assert_eq!(back.negative(), lex.negative());
    }

    #[test]
    fn demo_lexicon_matches_file_line_counts() {
        let count = |text: &str| {
            text.lines()
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .count()
        };
        let lex = SentimentLexicon::demo();
        assert_eq!(
            lexicon_stats(&lex),
            (count(DEMO_POSITIVE), count(DEMO_NEGATIVE))
        );
        assert!(lex.positive().len() >= 50 && lex.negative().len() >= 50);
        assert!(lex.is_positive(POS_EMOT) && lex.is_negative(NEG_EMOT));
    }
}
