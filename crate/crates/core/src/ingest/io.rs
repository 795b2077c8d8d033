//! Corpus files: RFC 4180 CSV or JSON lines, chosen by extension.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::{Corpus, Document, SentimentClass};
use crate::scoring::classify_score;

use super::IngestError;

pub const CSV_HEADER: [&str; 5] = ["senti_score", "text", "code", "candidate", "senti_class"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    JsonLines,
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => Ok(CorpusFormat::Csv),
            Some("jsonl") => Ok(CorpusFormat::JsonLines),
            _ => Err(IngestError::UnsupportedFormat(path.to_path_buf())),
        }
    }
}

/// RFC 4180 writer: comma separated, CRLF records, quotes only when needed.
pub fn csv_writer<W: Write>(inner: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(inner)
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => IngestError::MissingFile(path.to_path_buf()),
        _ => IngestError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, IngestError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus, IngestError> {
    let path = path.as_ref();
    let format = CorpusFormat::from_path(path)?;
    let file = open(path)?;
    let documents = match format {
        CorpusFormat::Csv => read_csv(file, path)?,
        CorpusFormat::JsonLines => read_jsonl(BufReader::new(file), path)?,
    };
    Ok(Corpus::new(documents).with_provenance(path.display().to_string()))
}

pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let format = CorpusFormat::from_path(path)?;
    let out = create(path)?;
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    match format {
        CorpusFormat::Csv => write_csv(&corpus.documents, out).map_err(|e| io_err(e.into())),
        CorpusFormat::JsonLines => write_jsonl(&corpus.documents, out).map_err(io_err),
    }
}

pub fn write_csv<W: Write>(documents: &[Document], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(CSV_HEADER)?;
    for d in documents {
        let score = d.senti_score.map(|s| s.to_string()).unwrap_or_default();
        let class = d.senti_class.map(|c| c.as_str()).unwrap_or_default();
        w.write_record([score.as_str(), &d.text, &d.code, &d.candidate, class])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(documents: &[Document], mut out: W) -> io::Result<()> {
    for d in documents {
        serde_json::to_writer(&mut out, d)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn check_consistent(doc: &Document, path: &Path, line: u64) -> Result<(), IngestError> {
    if let (Some(score), Some(class)) = (doc.senti_score, doc.senti_class) {
        if classify_score(score) != class {
            return Err(parse_error(
                path,
                line,
                format!("class {class} does not match score {score}"),
            ));
        }
    }
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R, path: &Path) -> Result<Vec<Document>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
    };
    let text_col = column("text").ok_or_else(|| parse_error(path, 1, "missing column \"text\""))?;
    let code_col = column("code");
    let candidate_col = column("candidate");
    let score_col = column("senti_score");
    let class_col = column("senti_class");

    let mut documents = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: Option<usize>| col.and_then(|c| record.get(c)).unwrap_or("");
        let senti_score = match field(score_col) {
            "" => None,
            s => Some(
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| parse_error(path, line, format!("invalid senti_score {s:?}")))?,
            ),
        };
        let senti_class = match field(class_col) {
            "" => None,
            s => Some(
                s.parse::<SentimentClass>()
                    .map_err(|m| parse_error(path, line, m))?,
            ),
        };
        let doc = Document {
            senti_score,
            text: record.get(text_col).unwrap_or("").to_string(),
            code: field(code_col).to_string(),
            candidate: field(candidate_col).to_string(),
            senti_class,
        };
        check_consistent(&doc, path, line)?;
        documents.push(doc);
    }
    Ok(documents)
}

pub fn read_jsonl<R: BufRead>(input: R, path: &Path) -> Result<Vec<Document>, IngestError> {
    let mut documents = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: JsonDocument =
            serde_json::from_str(&line).map_err(|e| parse_error(path, line_no, e.to_string()))?;
        let doc = doc.into_document();
        check_consistent(&doc, path, line_no)?;
        documents.push(doc);
    }
    Ok(documents)
}

/// Input shape for JSON lines: score and class may be null or missing.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDocument {
    #[serde(default)]
    senti_score: Option<i64>,
    text: String,
    #[serde(default)]
    code: String,
    #[serde(default)]
    candidate: String,
    #[serde(default)]
    senti_class: Option<SentimentClass>,
}

impl JsonDocument {
    fn into_document(self) -> Document {
        Document {
            senti_score: self.senti_score,
            text: self.text,
            code: self.code,
            candidate: self.candidate,
            senti_class: self.senti_class,
        }
    }
}
