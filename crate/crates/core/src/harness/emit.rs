//! Result records and their CSV / JSON forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One grid point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub d: Option<usize>,
    #[serde(rename = "L")]
    pub resolution: usize,
    pub epsilon: Option<f64>,
    pub rate: Option<f64>,
    pub se: Option<f64>,
    pub trials: usize,
    pub replicates: usize,
    /// Squared distance between the alternative and the null.
    pub separation: Option<f64>,
    pub threshold: Option<f64>,
    pub u_gamma: Option<f64>,
    pub flag: Option<String>,
}

pub const CSV_COLUMNS: [&str; 17] = [
    "n", "alpha", "gamma", "beta", "s", "R", "d", "L", "epsilon", "rate", "se", "trials", "replicates",
    "separation", "threshold", "u_gamma", "flag",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub kind: String,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    #[serde(default)]
    pub summary: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Binomial standard error of a rejection rate over `trials`.
pub fn binomial_se(rate: f64, trials: usize) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn to_csv(records: &[Record]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let fields = [
            r.n.to_string(),
            r.alpha.to_string(),
            r.gamma.to_string(),
            cell(&r.beta),
            cell(&r.s),
            cell(&r.radius),
            cell(&r.d),
            r.resolution.to_string(),
            cell(&r.epsilon),
            cell(&r.rate),
            cell(&r.se),
            r.trials.to_string(),
            r.replicates.to_string(),
            cell(&r.separation),
            cell(&r.threshold),
            cell(&r.u_gamma),
            r.flag.clone().unwrap_or_default().replace(',', ";"),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Write `<dir>/<kind>.csv` or `<dir>/<kind>.json`; returns the path.
pub fn emit(result: &ExperimentResult, dir: &Path, format: Format) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let (name, body) = match format {
        Format::Csv => (format!("{}.csv", result.kind), to_csv(&result.records)),
        Format::Json => (format!("{}.json", result.kind), result.to_json()?),
    };
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}
