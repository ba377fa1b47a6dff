use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::report::{Cell, StockReport, Summary};
use super::run::{RunOutcome, StockAnalysis};
use crate::error::{Error, Result};

pub const TABLE1_COLUMNS: [&str; 9] = [
    "stock",
    "lambda",
    "h_av",
    "h_avr",
    "h_hig",
    "h_higr",
    "h_bd",
    "h_bdr",
    "inv_alpha",
];
pub const TABLE2_COLUMNS: [&str; 9] = [
    "stock", "lambda", "lambda_f", "h_av", "h_avf", "h_hig", "h_higf", "h_bd", "h_bdf",
];

/// One line of the machine-readable error manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub ticker: Option<String>,
    /// Report cell or pipeline stage that failed; `None` for a whole stock.
    pub cell: Option<String>,
    pub message: String,
}

fn fmt_cell(c: &Cell) -> String {
    match c.value {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        _ => "NA".to_string(),
    }
}

fn table(reports: &[StockReport], columns: &[&str]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in reports {
        let cells = r.cells();
        let row: Vec<String> = columns
            .iter()
            .map(|&col| {
                if col == "stock" {
                    return r.ticker.clone();
                }
                cells
                    .iter()
                    .find(|(n, _)| *n == col)
                    .map(|(_, c)| fmt_cell(c))
                    .expect("known column")
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Empirical vs randomized exponents, one row per stock.
pub fn table1_csv(reports: &[StockReport]) -> String {
    table(reports, &TABLE1_COLUMNS)
}

/// Original vs reverted exponents, one row per stock.
pub fn table2_csv(reports: &[StockReport]) -> String {
    table(reports, &TABLE2_COLUMNS)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    write_text(path, &(json + "\n"))
}

#[derive(Serialize, Deserialize)]
struct StockFile {
    config: RunConfig,
    report: StockReport,
}

/// Per-stock report JSON, histogram CSVs and, when configured, series dumps.
/// Returns the files written.
pub fn write_stock(
    dir: &Path,
    analysis: &StockAnalysis,
    config: &RunConfig,
) -> Result<Vec<PathBuf>> {
    let prefix = format!("{}_{}", analysis.report.ticker, analysis.label());
    let mut written = Vec::new();
    let report_path = dir.join(format!("{prefix}_report.json"));
    write_json(
        &report_path,
        &StockFile {
            config: config.clone(),
            report: analysis.report.clone(),
        },
    )?;
    written.push(report_path);
    for h in &analysis.histograms {
        let p = dir
            .join("histograms")
            .join(format!("{prefix}_{}.csv", h.name));
        write_text(&p, &h.histogram.to_csv())?;
        written.push(p);
    }
    if config.dump_series {
        analysis
            .series
            .write(&dir.join("series"), &config.transform)?;
    }
    Ok(written)
}

/// Loads every `*_report.json` in `dir`, sorted by file name.
pub fn read_reports(dir: &Path) -> Result<Vec<StockReport>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry
            .file_name()
            .to_string_lossy()
            .ends_with("_report.json")
        {
            paths.push(entry.path());
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let file: StockFile = serde_json::from_str(&text).map_err(|e| Error::json(p, e))?;
            Ok(file.report)
        })
        .collect()
}

pub fn write_errors(path: &Path, errors: &[ErrorEntry]) -> Result<()> {
    write_json(path, &errors)
}

#[derive(Serialize)]
struct RunFile<'a> {
    config: &'a RunConfig,
    reports: Vec<&'a StockReport>,
    summary: Option<&'a Summary>,
    errors: &'a [ErrorEntry],
}

fn summary_csv(summary: &Summary) -> String {
    let mut out = String::from("field,n,mean,sd\n");
    let f = |v: Option<f64>| v.map_or("NA".to_string(), |v| format!("{v:.6}"));
    for s in &summary.fields {
        let _ = writeln!(out, "{},{},{},{}", s.name, s.n, f(s.mean), f(s.sd));
    }
    out
}

/// Writes everything a run produced under `out_dir` and returns the error
/// manifest (also saved as `errors.json`). Identical outcomes give
/// byte-identical files.
pub fn export_run(
    out_dir: &Path,
    outcome: &RunOutcome,
    config: &RunConfig,
) -> Result<Vec<ErrorEntry>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut errors: Vec<ErrorEntry> = outcome
        .failures
        .iter()
        .map(|(t, e)| ErrorEntry {
            ticker: Some(t.clone()),
            cell: None,
            message: e.to_string(),
        })
        .collect();
    for a in &outcome.analyses {
        write_stock(out_dir, a, config)?;
        errors.extend(
            a.report
                .failures()
                .into_iter()
                .map(|(cell, message)| ErrorEntry {
                    ticker: Some(a.report.ticker.clone()),
                    cell: Some(cell),
                    message,
                }),
        );
    }
    let reports: Vec<StockReport> = outcome.analyses.iter().map(|a| a.report.clone()).collect();
    write_tables(out_dir, &reports, outcome.summary.as_ref(), config, &errors)?;
    write_errors(&out_dir.join("errors.json"), &errors)?;
    Ok(errors)
}

/// `table1.csv`, `table2.csv`, `summary.csv` (when given) and the combined
/// `report.json` with the config embedded.
pub fn write_tables(
    out_dir: &Path,
    reports: &[StockReport],
    summary: Option<&Summary>,
    config: &RunConfig,
    errors: &[ErrorEntry],
) -> Result<()> {
    write_text(&out_dir.join("table1.csv"), &table1_csv(reports))?;
    write_text(&out_dir.join("table2.csv"), &table2_csv(reports))?;
    if let Some(s) = summary {
        write_text(&out_dir.join("summary.csv"), &summary_csv(s))?;
    }
    write_json(
        &out_dir.join("report.json"),
        &RunFile {
            config,
            reports: reports.iter().collect(),
            summary,
            errors,
        },
    )
}
