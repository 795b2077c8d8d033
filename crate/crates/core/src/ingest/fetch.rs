//! Paged collection from a document source with a resumable on-disk cache.
//!
//! Each profile is cached as `<cache_dir>/<name>.jsonl`. While a profile is
//! still being collected a `<name>.cursor` sidecar records how many documents
//! of the cache file are valid and where the source should resume. A cache
//! file without a sidecar is complete and is served without calling the
//! source.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Document};

use super::io::{read_jsonl, write_jsonl};
use super::{IngestError, Profile, SourceManifest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct SourceError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Page {
    pub texts: Vec<String>,
    /// Cursor for the following page; `None` when the query is exhausted.
    pub next: Option<String>,
}

/// Query → page of raw texts, with opaque string cursors.
pub trait DocumentSource {
    fn page(
        &mut self,
        query: &str,
        cursor: Option<&str>,
        page_size: usize,
    ) -> Result<Page, SourceError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchOptions {
    pub page_size: usize,
    /// Drop exact-duplicate texts within a profile.
    pub dedupe: bool,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            page_size: 100,
            dedupe: false,
        }
    }
}

/// File name stem for a profile query: characters outside `[A-Za-z0-9@._-]`
/// become `_`.
pub fn cache_file_name(query: &str) -> String {
    let mut name: String = query
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '@' | '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if name.starts_with('.') {
        name.insert(0, '_');
    }
    name
}

#[derive(Debug, Serialize, Deserialize)]
struct Cursor {
    collected: usize,
    next: Option<String>,
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_cursor(path: &Path, cursor: &Cursor) -> Result<(), IngestError> {
    let tmp = path.with_extension("cursor.tmp");
    let json = serde_json::to_vec(cursor).expect("cursor serializes");
    fs::write(&tmp, json).map_err(io_error(&tmp))?;
    fs::rename(&tmp, path).map_err(io_error(path))
}

fn read_cached(path: &Path) -> Result<Vec<Document>, IngestError> {
    let file = File::open(path).map_err(io_error(path))?;
    read_jsonl(BufReader::new(file), path)
}

struct ProfileCache {
    data: PathBuf,
    cursor: PathBuf,
}

impl ProfileCache {
    fn new(dir: &Path, profile: &Profile) -> Self {
        let stem = cache_file_name(&profile.query);
        ProfileCache {
            data: dir.join(format!("{stem}.jsonl")),
            cursor: dir.join(format!("{stem}.cursor")),
        }
    }
}

fn fetch_profile(
    profile: &Profile,
    cap: usize,
    cache: &ProfileCache,
    source: &mut dyn DocumentSource,
    options: &FetchOptions,
) -> Result<Vec<Document>, IngestError> {
    let (mut documents, mut next) = if cache.cursor.exists() {
        let text = fs::read_to_string(&cache.cursor).map_err(io_error(&cache.cursor))?;
        let state: Cursor = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
            path: cache.cursor.clone(),
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        let mut docs = if cache.data.exists() {
            read_cached(&cache.data)?
        } else {
            Vec::new()
        };
        // Rows written after the last cursor update are refetched.
        docs.truncate(state.collected);
        let file = File::create(&cache.data).map_err(io_error(&cache.data))?;
        write_jsonl(&docs, file).map_err(io_error(&cache.data))?;
        if state.collected > 0 && state.next.is_none() {
            fs::remove_file(&cache.cursor).map_err(io_error(&cache.cursor))?;
            return Ok(docs);
        }
        (docs, state.next)
    } else if cache.data.exists() {
        return read_cached(&cache.data);
    } else {
        write_cursor(
            &cache.cursor,
            &Cursor {
                collected: 0,
                next: None,
            },
        )?;
        File::create(&cache.data).map_err(io_error(&cache.data))?;
        (Vec::new(), None)
    };

    let mut seen: HashSet<String> = if options.dedupe {
        documents.iter().map(|d| d.text.clone()).collect()
    } else {
        HashSet::new()
    };
    let mut out = OpenOptions::new()
        .append(true)
        .open(&cache.data)
        .map_err(io_error(&cache.data))?;

    while documents.len() < cap {
        let want = (cap - documents.len()).min(options.page_size);
        let page = source
            .page(&profile.query, next.as_deref(), want)
            .map_err(|source| IngestError::Source {
                profile: profile.query.clone(),
                source,
            })?;
        let mut fresh = Vec::new();
        for text in page.texts {
            if documents.len() + fresh.len() == cap {
                break;
            }
            if options.dedupe && !seen.insert(text.clone()) {
                continue;
            }
            fresh.push(Document::new(
                text,
                profile.code.clone(),
                profile.candidate.clone(),
            ));
        }
        write_jsonl(&fresh, &mut out).map_err(io_error(&cache.data))?;
        documents.extend(fresh);
        next = page.next;
        let done = next.is_none() || documents.len() >= cap;
        write_cursor(
            &cache.cursor,
            &Cursor {
                collected: documents.len(),
                next: if done { None } else { next.clone() },
            },
        )?;
        if done {
            break;
        }
    }
    fs::remove_file(&cache.cursor).map_err(io_error(&cache.cursor))?;
    Ok(documents)
}

/// Collects up to `per_profile_cap` texts for each profile, in manifest
/// order. Profiles already complete in the cache are not requested again;
/// partially cached profiles resume from their stored cursor. On a source
/// failure everything collected so far stays cached.
pub fn fetch(
    manifest: &SourceManifest,
    source: &mut dyn DocumentSource,
    options: &FetchOptions,
) -> Result<Corpus, IngestError> {
    manifest.validate()?;
    if options.page_size == 0 {
        return Err(IngestError::InvalidPageSize);
    }
    fs::create_dir_all(&manifest.cache_dir).map_err(io_error(&manifest.cache_dir))?;
    let mut documents = Vec::new();
    for profile in &manifest.profiles {
        let cache = ProfileCache::new(&manifest.cache_dir, profile);
        documents.extend(fetch_profile(
            profile,
            manifest.per_profile_cap,
            &cache,
            source,
            options,
        )?);
    }
    Ok(Corpus::new(documents).with_provenance(manifest.cache_dir.display().to_string()))
}

/// In-memory source serving fixed text lists. Cursors are decimal offsets.
#[derive(Debug, Clone, Default)]
pub struct MockSource {
    texts: HashMap<String, Vec<String>>,
    calls: usize,
    fail_after: Option<usize>,
}

impl MockSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_texts(mut self, query: impl Into<String>, texts: Vec<String>) -> Self {
        self.texts.insert(query.into(), texts);
        self
    }

    /// Loads `<dir>/<name>.txt`, one text per line, keyed by file stem. A
    /// query maps to the file whose stem equals [`cache_file_name`] of it.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, IngestError> {
        let dir = dir.as_ref();
        let mut source = MockSource::new();
        let entries = fs::read_dir(dir).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => IngestError::MissingFile(dir.to_path_buf()),
            _ => IngestError::Io {
                path: dir.to_path_buf(),
                source: e,
            },
        })?;
        for entry in entries {
            let path = entry.map_err(io_error(dir))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let text = fs::read_to_string(&path).map_err(io_error(&path))?;
            let lines = text.lines().map(str::to_string).collect();
            source.texts.insert(stem.to_string(), lines);
        }
        Ok(source)
    }

    /// Makes every call after the first `calls` fail.
    pub fn fail_after(mut self, calls: usize) -> Self {
        self.fail_after = Some(calls);
        self
    }

    pub fn clear_failure(&mut self) {
        self.fail_after = None;
    }

    /// Number of `page` calls served so far, failed ones included.
    pub fn calls(&self) -> usize {
        self.calls
    }

    fn lookup(&self, query: &str) -> Option<&Vec<String>> {
        self.texts
            .get(query)
            .or_else(|| self.texts.get(&cache_file_name(query)))
    }
}

impl DocumentSource for MockSource {
    fn page(
        &mut self,
        query: &str,
        cursor: Option<&str>,
        page_size: usize,
    ) -> Result<Page, SourceError> {
        self.calls += 1;
        if self.fail_after.is_some_and(|limit| self.calls > limit) {
            return Err(SourceError("simulated source failure".into()));
        }
        let texts = self.lookup(query).map(Vec::as_slice).unwrap_or(&[]);
        let start = match cursor {
            None => 0,
            Some(c) => c
                .parse::<usize>()
                .map_err(|_| SourceError(format!("bad cursor {c:?}")))?,
        };
        let start = start.min(texts.len());
        let end = (start + page_size).min(texts.len());
        Ok(Page {
            texts: texts[start..end].to_vec(),
            next: (end < texts.len()).then(|| end.to_string()),
        })
    }
}
