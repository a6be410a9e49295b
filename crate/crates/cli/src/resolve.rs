//! Plain-text key=value configuration files, with flags taking precedence.
//!
//! Lines are `key = value`; `#` starts a comment. Keys not consumed by the
//! active subcommand are rejected, mirroring the strict flag handling.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub struct Resolver {
    entries: RefCell<BTreeMap<String, String>>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(format!(
                        "config line {} is not key=value: '{raw}'",
                        lineno + 1
                    ));
                };
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self {
            entries: RefCell::new(entries),
        })
    }

    fn take(&self, key: &str) -> Option<String> {
        self.entries.borrow_mut().remove(key)
    }

    /// Flag value if given, else config-file value, else the default.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, String>
    where
        T: FromStr + Display,
    {
        Ok(self.resolve_opt(key, flag)?.unwrap_or(default))
    }

    /// Flag value if given, else config-file value, else `None`.
    pub fn resolve_opt<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, String> {
        let file_value = self.take(key);
        if let Some(v) = flag {
            return Ok(Some(v));
        }
        match file_value {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("bad value for config key '{key}': '{raw}'")),
            None => Ok(None),
        }
    }

    pub fn resolve_path(
        &self,
        key: &str,
        flag: Option<PathBuf>,
    ) -> Result<Option<PathBuf>, String> {
        let file_value = self.take(key);
        if flag.is_some() {
            return Ok(flag);
        }
        Ok(file_value.map(PathBuf::from))
    }

    /// Reject config keys the subcommand did not recognize.
    pub fn finish(&self, subcommand: &str) -> Result<(), String> {
        let left = self.entries.borrow();
        if let Some((key, _)) = left.iter().next() {
            return Err(format!(
                "unknown config key '{key}' for subcommand '{subcommand}'"
            ));
        }
        Ok(())
    }
}
