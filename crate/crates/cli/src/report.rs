//! Errors, embedded assertions and artifact output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vpfp_core::io::{write_csv, write_json, LinePlot};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: vpfp_core::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Exit status: 2 for usage and configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core { source, .. } if !source.is_numerical() => 2,
            _ => 3,
        }
    }
}

/// Attaches experiment context to core errors.
pub trait Context<T> {
    fn ctx(self, context: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for vpfp_core::Result<T> {
    fn ctx(self, context: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: context.into(),
            source,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub results: serde_json::Value,
    pub files: Vec<String>,
}

/// Collects assertions and writes files into one output directory.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    assertions: Vec<Assertion>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            assertions: Vec::new(),
        })
    }

    fn io<T>(&mut self, name: &str, r: std::io::Result<T>) -> Result<T, CliError> {
        let path = self.dir.join(name);
        let v = r.map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.files.push(name.to_string());
        Ok(v)
    }

    pub fn csv<S: AsRef<str>>(&mut self, name: &str, header: &[S], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let header: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
        let r = write_csv(&self.dir.join(name), &header, rows);
        self.io(name, r)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let r = write_json(&self.dir.join(name), value);
        self.io(name, r)
    }

    pub fn svg(&mut self, name: &str, plot: &LinePlot) -> Result<(), CliError> {
        let r = plot.write(&self.dir.join(name));
        self.io(name, r)
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    /// Writes `summary.json` and returns it.
    pub fn finish(
        mut self,
        experiment: &str,
        parameters: BTreeMap<String, String>,
        results: serde_json::Value,
    ) -> Result<Summary, CliError> {
        self.files.push("summary.json".into());
        let summary = Summary {
            experiment: experiment.to_string(),
            parameters,
            passed: self.assertions.iter().all(|a| a.passed),
            assertions: self.assertions,
            results,
            files: self.files,
        };
        let path = self.dir.join("summary.json");
        write_json(&path, &summary).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(summary)
    }
}
