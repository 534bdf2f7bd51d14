use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::functionals::FUNCTIONAL_NAMES;
use super::study::{Trend, VanishingVerdict};
use crate::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

/// Functionals of one sweep member at the final time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub eps: f64,
    pub horizon: f64,
    pub values: BTreeMap<String, f64>,
    /// Seconds; reported in JSON only so the CSV stays reproducible.
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<DiagnosticsRow>,
    /// Least-squares slope of `log W_theta` against `log eps`.
    pub slope: Option<f64>,
    pub trends: BTreeMap<String, Trend>,
    pub vanishing: Vec<VanishingVerdict>,
    pub warnings: Vec<String>,
}

impl ConvergenceReport {
    pub fn new(
        config: ExperimentConfig,
        rows: Vec<DiagnosticsRow>,
        slope: Option<f64>,
        trends: BTreeMap<String, Trend>,
        vanishing: Vec<VanishingVerdict>,
        warnings: Vec<String>,
    ) -> Self {
        ConvergenceReport { schema: REPORT_SCHEMA, config, rows, slope, trends, vanishing, warnings }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: ConvergenceReport = serde_json::from_str(text)?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::Format(format!("report schema {} unsupported", r.schema)));
        }
        Ok(r)
    }

    /// Writes `diagnostics.csv`, `diagnostics_long.csv` and `report.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("diagnostics.csv"), wide_csv(&self.rows))?;
        std::fs::write(dir.join("diagnostics_long.csv"), long_csv(&self.rows))?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        Ok(())
    }
}

fn value(row: &DiagnosticsRow, name: &str) -> String {
    row.values.get(name).map(|v| v.to_string()).unwrap_or_default()
}

/// One row per Mach number: `eps,T`, then the functionals by name.
pub fn wide_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from("eps,T");
    for n in FUNCTIONAL_NAMES {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for r in rows {
        write!(out, "{},{}", r.eps, r.horizon).unwrap();
        for n in FUNCTIONAL_NAMES {
            write!(out, ",{}", value(r, n)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One row per (Mach number, functional), for plotting tools.
pub fn long_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from("eps,T,functional,value\n");
    for r in rows {
        for n in FUNCTIONAL_NAMES {
            writeln!(out, "{},{},{},{}", r.eps, r.horizon, n, value(r, n)).unwrap();
        }
    }
    out
}
