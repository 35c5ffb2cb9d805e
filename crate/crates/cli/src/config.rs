//! Flat `key = value` configuration files.
//!
//! The file named by `--config`, or else by `DIFFBOUND_CONFIG`, supplies
//! defaults for options not given on the command line.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const ENV_VAR: &str = "DIFFBOUND_CONFIG";

pub const KEYS: &[&str] = &[
    "format",
    "threads",
    "theory",
    "max-degree",
    "max-vars",
    "max-depth",
    "max-branches",
    "max-queries",
    "max-cost",
    "m",
    "vars",
    "ranking",
    "stub",
    "table",
    "ceiling",
    "max-len",
    "envelope",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
    source: String,
}

impl Config {
    pub fn parse(text: &str, source: &str) -> Result<Config, CliError> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("{source}:{}: {msg}", k + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`".into()))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(bad(format!("unknown key `{key}`")));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config {
            map,
            source: source.to_string(),
        })
    }

    /// Reads `path`, or the file named by the environment, or nothing.
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let env = std::env::var_os(ENV_VAR).filter(|v| !v.is_empty());
        let path = match (path, &env) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(e)) => e.into(),
            (None, None) => return Ok(Config::default()),
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text, &path.display().to_string())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        debug_assert!(KEYS.contains(&key), "{key}");
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                CliError::Usage(format!("{}: bad value `{v}` for `{key}`", self.source))
            }),
        }
    }

    /// The flag if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// Comma-separated list; a non-empty flag list wins.
    pub fn pick_list(&self, flag: &[String], key: &str) -> Vec<String> {
        if !flag.is_empty() {
            return flag.to_vec();
        }
        self.map
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default()
    }
}
