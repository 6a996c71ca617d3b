//! Serialized verification reports and their export formats.

use std::collections::BTreeSet;
use std::path::Path;

use grushin_hardy::CheckRecord;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

/// Inputs echoed into a report: one config or the configs of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Single(Box<RunConfig>),
    Suite(Vec<RunConfig>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub grushin_hardy: String,
    pub report_schema: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            grushin_hardy: env!("CARGO_PKG_VERSION").to_string(),
            report_schema: 1,
        }
    }
}

/// Field holding the run time; everything else is deterministic.
pub const WALL_CLOCK_FIELD: &str = "wall_clock_seconds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub versions: Versions,
    pub wall_clock_seconds: f64,
}

impl VerificationReport {
    pub fn new(config: ConfigEcho, checks: Vec<CheckRecord>, wall_clock_seconds: f64) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        Self {
            config,
            summary: Summary {
                passed,
                failed: checks.len() - passed,
            },
            checks,
            versions: Versions::default(),
            wall_clock_seconds,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    /// JSON with the wall-clock field removed, for reproducibility checks.
    pub fn deterministic_json(&self) -> Result<String, CliError> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove(WALL_CLOCK_FIELD);
        }
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    /// One row per check: name, passed, residual, quadrature_error, then
    /// every term key that occurs in any check (blank where absent).
    pub fn to_csv(&self) -> Result<String, CliError> {
        let keys: BTreeSet<&str> = self
            .checks
            .iter()
            .flat_map(|c| c.terms.keys().map(String::as_str))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["name", "passed", "residual", "quadrature_error"];
        header.extend(keys.iter().copied());
        w.write_record(&header)?;
        for c in &self.checks {
            let mut row = vec![
                c.name.clone(),
                c.passed.to_string(),
                c.residual.to_string(),
                c.quadrature_error.to_string(),
            ];
            row.extend(
                keys.iter()
                    .map(|k| c.terms.get(*k).map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Json,
    Csv,
}

pub fn export(
    report: &VerificationReport,
    format: ExportFormat,
    path: &Path,
) -> Result<(), CliError> {
    let text = match format {
        ExportFormat::Json => report.to_json()?,
        ExportFormat::Csv => report.to_csv()?,
    };
    std::fs::write(path, text).map_err(|e| CliError::Write(path.display().to_string(), e))
}
