//! Flat `key = value` configuration files, merged under command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const SEED_ENV: &str = "HYPOSPEC_SEED";

/// Every key a configuration file may set. Keys match the long flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "domain", "a", "b", "m", "r", "half", "n", "sigma", "samples", "h", "hx", "hy", "ht", "bbox",
    "mode", "k", "tol", "max-iter", "method", "seed", "output", "json", "export-matrix", "proxy",
    "spectrum", "family", "kmax", "alpha", "beta", "tol-dirichlet", "tol-clamped", "couples",
    "no-commutator", "lambda", "grid", "no-gate", "trials", "suite", "gamma",
];

#[derive(Debug, Clone, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Validation(format!("cannot read config {}: {e}", p.display()))
                })?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "config line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            let value = value.trim().trim_matches('"').to_string();
            file.insert(key, value);
        }
        Ok(Self { file })
    }

    /// The flag if given, otherwise the file value.
    pub fn value<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Validation(format!("config key '{key}' = '{raw}': {e}"))),
        }
    }

    pub fn value_or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.value(key, flag)?.unwrap_or(default))
    }

    /// Boolean switch: set by the flag or by a truthy file value.
    pub fn switch(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.file.get(key).map(|v| v.to_ascii_lowercase()) {
            None => Ok(false),
            Some(v) => match v.as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(CliError::Validation(format!(
                    "config key '{key}' = '{v}' is not a boolean"
                ))),
            },
        }
    }

    /// Flag, then `HYPOSPEC_SEED`, then the file, then the built-in default.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Ok(raw) = std::env::var(SEED_ENV) {
            return raw
                .trim()
                .parse()
                .map_err(|e| CliError::Validation(format!("{SEED_ENV}='{raw}': {e}")));
        }
        self.value_or("seed", None, hypospec::eigensolver::DEFAULT_SEED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let s = Settings::parse("# run\nk = 5\n\ntol=1e-9\nmax_iter = 40\ndomain = \"torus\"\n")
            .unwrap();
        assert_eq!(s.value_or::<usize>("k", None, 1).unwrap(), 5);
        assert_eq!(s.value_or::<f64>("tol", None, 0.0).unwrap(), 1e-9);
        assert_eq!(s.value_or::<usize>("max-iter", None, 0).unwrap(), 40);
        assert_eq!(s.value::<String>("domain", None).unwrap().unwrap(), "torus");
    }

    #[test]
    fn flags_override_file() {
        let s = Settings::parse("k = 5\nproxy = no").unwrap();
        assert_eq!(s.value_or("k", Some(7usize), 1).unwrap(), 7);
        assert!(!s.switch("proxy", false).unwrap());
        assert!(s.switch("proxy", true).unwrap());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Settings::parse("k 5").is_err());
        assert!(Settings::parse("colour = red").is_err());
        let s = Settings::parse("k = five").unwrap();
        assert!(s.value::<usize>("k", None).is_err());
    }
}
