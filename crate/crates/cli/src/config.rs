//! `--config` file support.
//!
//! The config file is a JSON object whose keys are the invoked subcommand's
//! flag names in snake_case. Precedence is flag > config file > built-in
//! default. Unknown keys are usage errors.

use anyhow::Result;
use serde_json::{Map, Value};
use std::fmt;
use std::path::Path;

/// Error that should exit with the usage status code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

pub fn usage_error<T>(message: impl Into<String>) -> Result<T> {
    Err(UsageError(message.into()).into())
}

#[derive(Debug, Default)]
pub struct FileConfig {
    values: Map<String, Value>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            Value::Object(values) => Ok(Self { values }),
            _ => usage_error(format!("config {} must be a JSON object", path.display())),
        }
    }

    /// Rejects keys that are not flags of the invoked subcommand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return usage_error(format!(
                    "config key {key:?} is not a flag of this subcommand (expected one of {allowed:?})"
                ));
            }
        }
        Ok(())
    }

    fn get<T, F: Fn(&Value) -> Option<T>>(&self, key: &str, convert: F, want: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(value) => match convert(value) {
                Some(v) => Ok(Some(v)),
                None => usage_error(format!("config key {key:?} must be {want}, got {value}")),
            },
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, Value::as_f64, "a number")
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key, Value::as_u64, "a nonnegative integer")
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key, Value::as_bool, "a boolean")
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        self.get(key, |v| v.as_str().map(str::to_string), "a string")
    }
}

/// Flag > config file > default.
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag > config file, otherwise a usage error naming the flag.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    match flag.or(file) {
        Some(v) => Ok(v),
        None => usage_error(format!("--{name} is required (flag or config file)")),
    }
}
