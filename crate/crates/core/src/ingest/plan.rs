//! Request planning under a per-window request budget.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateLimitPolicy {
    pub window_seconds: u64,
    pub budget_per_window: u64,
}

impl RateLimitPolicy {
    pub const DEFAULT_WINDOW_SECONDS: u64 = 900;

    pub fn new(window_seconds: u64, budget_per_window: u64) -> Result<Self, IngestError> {
        if window_seconds == 0 {
            return Err(IngestError::InvalidPolicy(
                "window length must be positive".into(),
            ));
        }
        if budget_per_window == 0 {
            return Err(IngestError::InvalidPolicy("budget must be positive".into()));
        }
        Ok(RateLimitPolicy {
            window_seconds,
            budget_per_window,
        })
    }

    /// Fifteen-minute window with the given budget.
    pub fn with_budget(budget_per_window: u64) -> Result<Self, IngestError> {
        Self::new(Self::DEFAULT_WINDOW_SECONDS, budget_per_window)
    }
}

/// A search query plus the labels attached to every document it yields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ProfileSpec")]
pub struct Profile {
    pub query: String,
    pub code: String,
    pub candidate: String,
}

impl Profile {
    pub fn new(query: impl Into<String>) -> Self {
        Profile {
            query: query.into(),
            code: String::new(),
            candidate: String::new(),
        }
    }
}

/// Manifest entries may be a bare query string or a full object.
#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileSpec {
    Query(String),
    Full {
        query: String,
        #[serde(default)]
        code: String,
        #[serde(default)]
        candidate: String,
    },
}

impl From<ProfileSpec> for Profile {
    fn from(spec: ProfileSpec) -> Self {
        match spec {
            ProfileSpec::Query(query) => Profile::new(query),
            ProfileSpec::Full {
                query,
                code,
                candidate,
            } => Profile {
                query,
                code,
                candidate,
            },
        }
    }
}

fn default_cap() -> usize {
    SourceManifest::DEFAULT_CAP
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceManifest {
    pub profiles: Vec<Profile>,
    #[serde(default = "default_cap")]
    pub per_profile_cap: usize,
    #[serde(default)]
    pub cache_dir: PathBuf,
}

impl SourceManifest {
    pub const DEFAULT_CAP: usize = 1500;

    pub fn new(
        profiles: Vec<Profile>,
        per_profile_cap: usize,
        cache_dir: impl Into<PathBuf>,
    ) -> Result<Self, IngestError> {
        let manifest = SourceManifest {
            profiles,
            per_profile_cap,
            cache_dir: cache_dir.into(),
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.profiles.is_empty() {
            return Err(IngestError::InvalidManifest("no profiles listed".into()));
        }
        if self.per_profile_cap == 0 {
            return Err(IngestError::InvalidManifest(
                "per_profile_cap must be positive".into(),
            ));
        }
        if let Some(p) = self.profiles.iter().find(|p| p.query.is_empty()) {
            return Err(IngestError::InvalidManifest(format!(
                "empty query for candidate {:?}",
                p.candidate
            )));
        }
        Ok(())
    }

    /// Reads a JSON manifest. A relative `cache_dir` is resolved against the
    /// manifest's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => IngestError::MissingFile(path.to_path_buf()),
            _ => IngestError::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        let mut manifest: SourceManifest =
            serde_json::from_str(&text).map_err(|e| IngestError::Parse {
                path: path.to_path_buf(),
                line: e.line() as u64,
                message: e.to_string(),
            })?;
        if manifest.cache_dir.is_relative() {
            if let Some(parent) = path.parent() {
                manifest.cache_dir = parent.join(&manifest.cache_dir);
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlannedRequest {
    pub query: String,
    pub page_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FetchPlan {
    pub requests: Vec<PlannedRequest>,
    /// Window index of each request.
    pub schedule: Vec<u64>,
    pub total_windows: u64,
    /// Time from the first request to the start of the last window.
    pub total_duration_seconds: u64,
}

/// Pages every profile up to its cap and packs the requests greedily, in
/// manifest order, into consecutive windows.
pub fn plan_fetch(
    manifest: &SourceManifest,
    policy: &RateLimitPolicy,
    page_size: usize,
) -> Result<FetchPlan, IngestError> {
    if page_size == 0 {
        return Err(IngestError::InvalidPageSize);
    }
    let mut requests = Vec::new();
    for profile in &manifest.profiles {
        let mut remaining = manifest.per_profile_cap;
        while remaining > 0 {
            let size = remaining.min(page_size);
            requests.push(PlannedRequest {
                query: profile.query.clone(),
                page_size: size,
            });
            remaining -= size;
        }
    }
    let budget = policy.budget_per_window;
    let schedule: Vec<u64> = (0..requests.len() as u64).map(|i| i / budget).collect();
    let total_windows = schedule.last().map_or(0, |w| w + 1);
    Ok(FetchPlan {
        requests,
        schedule,
        total_windows,
        total_duration_seconds: total_windows.saturating_sub(1) * policy.window_seconds,
    })
}
