//! Corpus file I/O, pluggable document sources and rate-limit planning.

mod fetch;
mod io;
mod plan;

use std::path::PathBuf;

use thiserror::Error;

pub use fetch::{
    cache_file_name, fetch, DocumentSource, FetchOptions, MockSource, Page, SourceError,
};
pub use io::{
    csv_writer, read_corpus, read_csv, read_jsonl, write_corpus, write_csv, write_jsonl,
    CorpusFormat, CSV_HEADER,
};
pub use plan::{plan_fetch, FetchPlan, PlannedRequest, Profile, RateLimitPolicy, SourceManifest};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("unsupported corpus format (expected .csv or .jsonl): {}", .0.display())]
    UnsupportedFormat(PathBuf),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("invalid rate limit policy: {0}")]
    InvalidPolicy(String),
    #[error("page size must be positive")]
    InvalidPageSize,
    #[error("source failed for profile {profile:?}: {source}")]
    Source {
        profile: String,
        #[source]
        source: SourceError,
    },
}
