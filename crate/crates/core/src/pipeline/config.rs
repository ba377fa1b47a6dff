use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::burst::{BurstFitConfig, DurationKind, DEFAULT_MULTIPLIERS};
use crate::error::{Error, Result};
use crate::estimators::TailConfig;
use crate::lob::DEFAULT_DEPTH;
use crate::synth::GenSpec;
use crate::transform::TransformConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub msd_lag_min: usize,
    /// Defaults to N/100 when absent.
    pub msd_lag_max: Option<usize>,
    pub msd_lag_count: usize,
    /// Upper cap on AVE block sizes and Higuchi strides.
    pub max_scale: Option<usize>,
    pub tail: TailConfig,
    pub burst: BurstFitConfig,
    /// Which zero-threshold durations feed H_BD.
    pub burst_kind: DurationKind,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            msd_lag_min: 10,
            msd_lag_max: None,
            msd_lag_count: 20,
            max_scale: None,
            tail: TailConfig::default(),
            burst: BurstFitConfig::default(),
            burst_kind: DurationKind::Burst,
        }
    }
}

/// A generated "stock": one ARFIMA path cut into `days` equal trading days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStock {
    pub ticker: String,
    pub spec: GenSpec,
    #[serde(default = "one")]
    pub days: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub data_root: PathBuf,
    pub tickers: Vec<String>,
    /// Inclusive ISO dates.
    pub date_range: Option<(String, String)>,
    pub depth: usize,
    /// `transform.seed` is the master seed for every shuffle.
    pub transform: TransformConfig,
    pub estimators: EstimatorConfig,
    pub thresholds: Vec<f64>,
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
    /// Write every intermediate series next to the reports.
    pub dump_series: bool,
    pub synthetic: Vec<SyntheticStock>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_root: PathBuf::from("data"),
            tickers: Vec::new(),
            date_range: None,
            depth: DEFAULT_DEPTH,
            transform: TransformConfig::default(),
            estimators: EstimatorConfig::default(),
            thresholds: DEFAULT_MULTIPLIERS.to_vec(),
            out_dir: PathBuf::from("out"),
            jobs: None,
            dump_series: false,
            synthetic: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn synthetic_stock(&self, ticker: &str) -> Option<&SyntheticStock> {
        self.synthetic.iter().find(|s| s.ticker == ticker)
    }

    /// Every configured ticker, LOBSTER-backed ones first, then synthetic.
    pub fn all_tickers(&self) -> Vec<String> {
        let mut out = self.tickers.clone();
        for s in &self.synthetic {
            if !out.contains(&s.ticker) {
                out.push(s.ticker.clone());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::param("depth must be at least 1"));
        }
        self.transform.validate()?;
        if self.thresholds.iter().any(|m| !m.is_finite()) {
            return Err(Error::param("threshold multipliers must be finite"));
        }
        if self.jobs == Some(0) {
            return Err(Error::param("jobs must be at least 1"));
        }
        let needs_data = self
            .tickers
            .iter()
            .any(|t| self.synthetic_stock(t).is_none());
        if needs_data && !self.data_root.is_dir() {
            return Err(Error::MissingData(format!(
                "data_root {} is not a directory",
                self.data_root.display()
            )));
        }
        for s in &self.synthetic {
            s.spec.validate()?;
            if s.days == 0 || s.spec.length / s.days < 2 {
                return Err(Error::param(format!(
                    "synthetic stock {} needs at least 2 samples per day",
                    s.ticker
                )));
            }
        }
        if let Some((a, b)) = &self.date_range {
            if a > b {
                return Err(Error::param(format!("date range {a} > {b}")));
            }
        }
        Ok(())
    }
}
