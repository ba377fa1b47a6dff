//! Ordered real-valued series with provenance metadata, plus the single-column
//! CSV / JSON-sidecar dump format shared by every stage.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Empirical,
    Increments,
    Shuffled,
    Bounded,
    Reverted,
    Synthetic,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Empirical => "empirical",
            SeriesKind::Increments => "increments",
            SeriesKind::Shuffled => "shuffled",
            SeriesKind::Bounded => "bounded",
            SeriesKind::Reverted => "reverted",
            SeriesKind::Synthetic => "synthetic",
        }
    }

    /// Path-type kinds (levels rather than steps).
    pub fn is_path(self) -> bool {
        matches!(self, SeriesKind::Empirical | SeriesKind::Bounded)
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub ticker: String,
    pub date_start: Option<String>,
    pub date_end: Option<String>,
    pub source: String,
    /// Transform steps applied so far, including PRNG name and seed where relevant.
    #[serde(default)]
    pub provenance: Vec<String>,
}

impl SeriesMeta {
    pub fn new(ticker: impl Into<String>, source: impl Into<String>) -> Self {
        SeriesMeta {
            ticker: ticker.into(),
            source: source.into(),
            ..Default::default()
        }
    }

    pub fn with_date(mut self, date: impl Into<String>) -> Self {
        let date = date.into();
        self.date_start = Some(date.clone());
        self.date_end = Some(date);
        self
    }

    /// `start_end` when the range spans several days, the single date otherwise.
    pub fn date_label(&self) -> String {
        match (&self.date_start, &self.date_end) {
            (Some(a), Some(b)) if a == b => a.clone(),
            (Some(a), Some(b)) => format!("{a}_{b}"),
            (Some(a), None) | (None, Some(a)) => a.clone(),
            (None, None) => "nodate".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub values: Vec<f64>,
    pub kind: SeriesKind,
    pub meta: SeriesMeta,
}

impl Series {
    pub fn new(values: Vec<f64>, kind: SeriesKind, meta: SeriesMeta) -> Self {
        Series { values, kind, meta }
    }

    /// Unlabelled series, mostly for tests and ad-hoc analysis.
    pub fn from_values(values: Vec<f64>, kind: SeriesKind) -> Self {
        Series::new(values, kind, SeriesMeta::default())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Same metadata, new values and kind, with one provenance step appended.
    pub fn derive(&self, values: Vec<f64>, kind: SeriesKind, step: impl Into<String>) -> Series {
        let mut meta = self.meta.clone();
        meta.provenance.push(step.into());
        Series { values, kind, meta }
    }

    /// Deterministic file stem `ticker_date_kind`.
    pub fn file_stem(&self) -> String {
        let ticker = if self.meta.ticker.is_empty() {
            "series"
        } else {
            &self.meta.ticker
        };
        format!("{}_{}_{}", ticker, self.meta.date_label(), self.kind)
    }

    /// Writes the values as a single-column CSV and the metadata as `<path>.json`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for v in &self.values {
            writeln!(w, "{v}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;

        let sidecar = sidecar_path(path);
        let header = SeriesHeader {
            kind: self.kind,
            meta: self.meta.clone(),
            len: self.values.len(),
        };
        let json = serde_json::to_string_pretty(&header).map_err(|e| Error::json(&sidecar, e))?;
        fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))
    }

    /// Reads a series written by [`Series::write_csv`]. Without a sidecar the
    /// series is loaded as `kind` with empty metadata.
    pub fn read_csv(path: &Path, fallback_kind: SeriesKind) -> Result<Series> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let origin = path.display().to_string();
        let mut values = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: f64 = t.parse().map_err(|_| Error::Parse {
                origin: origin.clone(),
                line: idx + 1,
                msg: format!("not a number: {t:?}"),
            })?;
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }

        let sidecar = sidecar_path(path);
        let (kind, meta) = if sidecar.exists() {
            let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
            let header: SeriesHeader =
                serde_json::from_str(&text).map_err(|e| Error::json(&sidecar, e))?;
            (header.kind, header.meta)
        } else {
            (fallback_kind, SeriesMeta::default())
        };
        Ok(Series { values, kind, meta })
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesHeader {
    kind: SeriesKind,
    meta: SeriesMeta,
    len: usize,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}
