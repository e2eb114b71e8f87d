//! Error-to-exit-code mapping, tolerance overrides, and artifact writers.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use extremal_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: files, JSON, parameters. Exit 2.
    Input(String),
    /// Solver non-convergence. Exit 3.
    Solver(String),
    /// A verified bound was violated. Exit 4.
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Violation(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Solver(m) => write!(f, "solver did not converge: {m}"),
            CliError::Violation(m) => write!(f, "bound violated: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence { .. } => CliError::Solver(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// The decision-level tolerances the CLI applies, overridable via --tol.
#[derive(Clone, Copy, Debug)]
pub struct ToleranceSet {
    /// Additive slack on `ratio <= bound` decisions.
    pub ratio_slack: f64,
    /// Multiplicative slack on the equivalence-ratio bounds.
    pub mult_slack: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            ratio_slack: extremal_core::tol::RATIO_SLACK,
            mult_slack: extremal_core::tol::RATIO_MULT,
        }
    }
}

impl ToleranceSet {
    pub fn from_overrides(specs: &[String]) -> CliResult<Self> {
        let mut set = ToleranceSet::default();
        for spec in specs {
            let (name, val) = spec
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("--tol expects NAME=VAL, got {spec:?}")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| CliError::input(format!("--tol {name}: {val:?} is not a number")))?;
            if val.is_nan() || val <= 0.0 {
                return Err(CliError::input(format!("--tol {name} must be positive")));
            }
            match name {
                "ratio_slack" => set.ratio_slack = val,
                "mult_slack" => set.mult_slack = val,
                other => {
                    return Err(CliError::input(format!(
                        "unknown tolerance {other:?} (known: ratio_slack, mult_slack)"
                    )))
                }
            }
        }
        Ok(set)
    }

    /// Canonical one-field encoding embedded in every artifact.
    pub fn describe(&self) -> String {
        format!(
            "mult_slack={};ratio_slack={}",
            self.mult_slack, self.ratio_slack
        )
    }
}

pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Resolve the seed: flag, then EXTREMAL_SEED, then the library default.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(env) = std::env::var("EXTREMAL_SEED") {
        return env.parse().map_err(|_| {
            CliError::input(format!("EXTREMAL_SEED={env:?} is not a 64-bit integer"))
        });
    }
    Ok(extremal_core::sphere::DEFAULT_SEED)
}

/// A CSV artifact: optional `# generated_at_unix` comment line, then a
/// mandatory header row and RFC-quoted records.
pub struct CsvOut {
    writer: csv::Writer<File>,
}

impl CsvOut {
    pub fn create(path: &Path, with_timestamp: bool, header: &[&str]) -> CliResult<Self> {
        let mut file = File::create(path)?;
        if with_timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(file, "# generated_at_unix {secs}")?;
        }
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        Ok(CsvOut { writer })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal form; empty string for absent values.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut file = File::create(path)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::input(format!("serializing report: {e}")))?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}
