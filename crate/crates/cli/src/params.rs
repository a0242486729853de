//! Flat `key=value` configuration with dotted namespaces.
//!
//! Files hold one assignment per line; `#` starts a comment. Later
//! assignments win, so `--set` overrides anything read from `--config`.
//! Every key must be consumed by the experiment, otherwise the run is
//! rejected before any work starts.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::str::FromStr;

use crate::report::CliError;

#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
    /// Every value read, defaults included, in the order of first use.
    resolved: RefCell<BTreeMap<String, String>>,
}

fn parse_assignment(line: &str) -> Result<(String, String), String> {
    let (k, v) = line.split_once('=').ok_or_else(|| format!("expected key=value, got '{line}'"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
        return Err(format!("invalid key '{k}'"));
    }
    if v.is_empty() {
        return Err(format!("missing value for '{k}'"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl Params {
    pub fn parse_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = parse_assignment(line).map_err(|e| CliError::Usage(format!("{origin}:{}: {e}", n + 1)))?;
            self.values.insert(k, v);
        }
        Ok(())
    }

    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = parse_assignment(assignment).map_err(|e| CliError::Usage(format!("--set: {e}")))?;
        self.values.insert(k, v);
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(String::as_str)
    }

    fn record(&self, key: &str, v: String) {
        self.resolved.borrow_mut().insert(key.to_string(), v);
    }

    pub fn get<T: FromStr + Display>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let v = match self.raw(key) {
            Some(s) => s
                .parse::<T>()
                .map_err(|e| CliError::Usage(format!("{key}: cannot parse '{s}': {e}")))?,
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn get_opt<T: FromStr + Display>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            Some(s) => {
                let v = s
                    .parse::<T>()
                    .map_err(|e| CliError::Usage(format!("{key}: cannot parse '{s}': {e}")))?;
                self.record(key, v.to_string());
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr + Display + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>, CliError>
    where
        T::Err: Display,
    {
        let v = match self.raw(key) {
            Some(s) => s
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<T>()
                        .map_err(|e| CliError::Usage(format!("{key}: cannot parse '{}': {e}", p.trim())))
                })
                .collect::<Result<Vec<T>, _>>()?,
            None => default.to_vec(),
        };
        if v.is_empty() {
            return Err(CliError::Usage(format!("{key}: list is empty")));
        }
        let shown: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.record(key, shown.join(","));
        Ok(v)
    }

    /// Fails on keys that no part of the experiment asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self.values.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unknown configuration keys: {}", unknown.join(", "))))
        }
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }
}
