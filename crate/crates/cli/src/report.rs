//! Checks, run reports and exit codes shared by every verb.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use snaking_core::Error;

pub const REPORT_FILE: &str = "report.json";
pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numerical { context: String, source: Error },
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
}

impl CliError {
    /// Core errors that describe bad input map to the config code; the
    /// rest are numerical aborts.
    pub fn core(context: impl Into<String>, source: Error) -> Self {
        match source {
            Error::InvalidParams(_) | Error::InvalidCurve(_) | Error::InvalidGrid(_) => {
                CliError::Config(format!("{}: {source}", context.into()))
            }
            source => CliError::Numerical { context: context.into(), source },
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(path.to_path_buf(), e)
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(..) => ExitCode::from(3),
            CliError::Numerical { .. } => ExitCode::from(4),
        }
    }
}

/// One verdict. `id` is stable across runs and `anchor` names the property
/// being checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    /// `value ≤ threshold` or `value ≥ threshold`.
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    AtMost,
    AtLeast,
}

impl Check {
    pub fn at_most(id: impl Into<String>, anchor: impl Into<String>, value: f64, threshold: f64) -> Self {
        let passed = value <= threshold;
        Check { id: id.into(), anchor: anchor.into(), passed, value, threshold, sense: Sense::AtMost }
    }

    pub fn at_least(id: impl Into<String>, anchor: impl Into<String>, value: f64, threshold: f64) -> Self {
        let passed = value >= threshold;
        Check { id: id.into(), anchor: anchor.into(), passed, value, threshold, sense: Sense::AtLeast }
    }

    /// A yes/no property reported as `1` or `0` against a threshold of `1`.
    pub fn holds(id: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Self::at_least(id, anchor, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn with_passed(mut self, passed: bool) -> Self {
        self.passed &= passed;
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.sense {
            Sense::AtMost => "<=",
            Sense::AtLeast => ">=",
        };
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {} ({}): {:.3e} {op} {:.3e}", self.id, self.anchor, self.value, self.threshold)
    }
}

/// What `verify` and `simulate` write to `report.json`.
#[derive(Debug, Serialize)]
pub struct RunReport<C: Serialize> {
    pub format: u32,
    pub command: &'static str,
    pub seed: u64,
    pub config: C,
    pub derived: Value,
    pub checks: Vec<Check>,
    pub details: Value,
    pub passed: bool,
}

impl<C: Serialize> RunReport<C> {
    pub fn new(command: &'static str, seed: u64, config: C, derived: Value, checks: Vec<Check>, details: Value) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        RunReport { format: REPORT_FORMAT, command, seed, config, derived, checks, details, passed }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Everything except the trailing timestamp line is a function of the
    /// config and seed.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(REPORT_FILE);
        write_json_with_timestamp(&path, self)?;
        write_checks_csv(&dir.join("checks.csv"), &self.checks)?;
        Ok(path)
    }
}

pub fn write_json_with_timestamp<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let body = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    let Value::Object(map) = body else { unreachable!("reports serialize to objects") };
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("in-memory JSON");
    // the closing brace is the last byte
    text.pop();
    while text.ends_with(char::is_whitespace) {
        text.pop();
    }
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    text.push_str(&format!(",\n  \"timestamp\": {secs}\n}}\n"));
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_checks_csv(path: &Path, checks: &[Check]) -> Result<(), CliError> {
    let mut out = Vec::new();
    writeln!(out, "id,anchor,passed,value,threshold,sense").unwrap();
    for c in checks {
        let sense = match c.sense {
            Sense::AtMost => "at_most",
            Sense::AtLeast => "at_least",
        };
        writeln!(out, "{},\"{}\",{},{:e},{:e},{sense}", c.id, c.anchor.replace('"', "\"\""), c.passed, c.value, c.threshold).unwrap();
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Print every check, name the first failure on stderr, and pick the exit code.
pub fn finish<C: Serialize>(report: &RunReport<C>, path: &Path) -> ExitCode {
    for c in &report.checks {
        println!("{c}");
    }
    println!("report written to {}", path.display());
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!("check failed: {} ({})", c.id, c.anchor);
            ExitCode::from(2)
        }
    }
}
