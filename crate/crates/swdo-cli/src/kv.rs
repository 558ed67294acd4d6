//! Flat `key=value` run-configuration files.
//!
//! One assignment per line; blank lines and `#` comments are skipped. CLI
//! flags override file values. Every key must be consumed by its command:
//! leftovers are reported as configuration errors so typos cannot pass
//! silently.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use swdo::{Error, Result};

pub struct Kv {
    values: BTreeMap<String, String>,
    source: String,
}

impl Kv {
    fn empty() -> Self {
        Kv {
            values: BTreeMap::new(),
            source: "<no config file>".to_string(),
        }
    }

    /// Parse a config file; `None` yields an empty set of values.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Kv::empty());
        };
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut values = BTreeMap::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    i + 1
                )));
            };
            let key = key.trim().to_string();
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::config(format!(
                    "{}:{}: duplicate key '{key}'",
                    path.display(),
                    i + 1
                )));
            }
        }
        Ok(Kv {
            values,
            source: path.display().to_string(),
        })
    }

    /// Remove and return a raw string value.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    /// Remove and parse a value. A malformed value is an error even when a
    /// CLI flag would override it, so broken files never pass silently.
    pub fn take_parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::config(format!(
                    "{}: key '{key}' has invalid value '{raw}'",
                    self.source
                ))
            }),
        }
    }

    /// Fail on any key no command consumed.
    pub fn finish(self) -> Result<()> {
        if self.values.is_empty() {
            Ok(())
        } else {
            let keys: Vec<String> = self.values.into_keys().collect();
            Err(Error::config(format!(
                "{}: unknown keys: {}",
                self.source,
                keys.join(", ")
            )))
        }
    }
}
