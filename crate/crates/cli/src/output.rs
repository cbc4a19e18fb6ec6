//! CSV datasets and the key/value summary.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A table held in memory until every invariant has been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub file_name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(file_name: impl Into<String>, header: &[&'static str]) -> Self {
        Dataset {
            file_name: file_name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Numbers are written with `{:e}`, the shortest form that round-trips.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(&self.file_name);
        write_with(&path, |w| {
            writeln!(w, "{}", self.header.join(","))?;
            for row in &self.rows {
                let mut first = true;
                for v in row {
                    if !first {
                        w.write_all(b",")?;
                    }
                    write!(w, "{v:e}")?;
                    first = false;
                }
                w.write_all(b"\n")?;
            }
            Ok(())
        })?;
        Ok(path)
    }
}

/// Acceptance band `[lo, hi]` for one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value >= self.lo && self.value <= self.hi
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
    checks: Vec<Check>,
}

impl Summary {
    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn number(&mut self, key: impl Into<String>, value: f64) {
        self.set(key, format!("{value:e}"));
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, lo: f64, hi: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            lo,
            hi,
        });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    /// `status` comes first so a truncated run is obvious at a glance.
    pub fn write(&self, dir: &Path, status: &str) -> Result<PathBuf, CliError> {
        let path = dir.join("summary.txt");
        write_with(&path, |w| {
            writeln!(w, "status = {status}")?;
            for (k, v) in &self.entries {
                writeln!(w, "{k} = {v}")?;
            }
            for c in &self.checks {
                let verdict = if c.passed() { "pass" } else { "fail" };
                writeln!(
                    w,
                    "check.{} = {verdict} value={:e} band=[{:e},{:e}]",
                    c.name, c.value, c.lo, c.hi
                )?;
            }
            writeln!(w, "checks_failed = {}", self.failed_checks())
        })?;
        Ok(path)
    }
}

fn write_with(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}
