//! `key = value` configuration files. Keys are long flag names without the
//! leading dashes; a flag given on the command line always wins.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

/// A mistake in how the program was invoked (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

pub const KNOWN_KEYS: &[&str] = &[
    "algo",
    "alpha",
    "binarize",
    "budget",
    "c",
    "cache",
    "check-sorted",
    "corpus",
    "csv",
    "dedupe",
    "depth",
    "dry-run",
    "emoticons",
    "epochs",
    "exclude-neutral",
    "hist-out",
    "json",
    "k",
    "lambda",
    "manifest",
    "max-iters",
    "min-split",
    "model",
    "model-out",
    "neg",
    "out",
    "p-train",
    "page-size",
    "plan-out",
    "pos",
    "seed",
    "source",
    "sparse",
    "summary-out",
    "svg",
    "test-out",
    "train-out",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                UsageError(format!("config line {}: expected key=value", idx + 1))
            })?;
            let key = key.trim().trim_start_matches("--");
            if !KNOWN_KEYS.contains(&key) {
                return Err(UsageError(format!(
                    "config line {}: unknown key {key:?}",
                    idx + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Ok(Self::parse(&text)?)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value, else config value, else `None`.
    pub fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config value for {key:?}: {e}"))),
        }
    }

    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> anyhow::Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> anyhow::Result<T>
    where
        T::Err: fmt::Display,
    {
        self.opt(flag, key)?
            .ok_or_else(|| usage(format!("missing required option --{key}")))
    }

    /// Boolean switches: set on the command line, or `true`/`false` in the
    /// config file.
    pub fn switch(&self, flag: bool, key: &str) -> anyhow::Result<bool> {
        Ok(flag || self.or(None, key, false)?)
    }
}
