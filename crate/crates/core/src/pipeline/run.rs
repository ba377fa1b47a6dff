use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SyntheticStock};
use super::derive_seed;
use super::report::{aggregate, Cell, StockReport, Summary, SweepCell};
use crate::burst::{durations, fit_burst_pdf, std_dev, DurationKind, DurationSample};
use crate::error::{Error, Result};
use crate::estimators::{
    ave_block_grid, ave_hurst, fit_msd_exponent, higuchi_hurst, higuchi_window_grid, hill_nu,
    msd_lags, sample_msd, tail_fit, LogHistogram, TailSide,
};
use crate::lob::{build_disbalance, increments, join_daily, parse_messages, parse_orderbook};
use crate::series::{Series, SeriesKind, SeriesMeta};
use crate::synth::gen_arfima_increments;
use crate::transform::{
    accumulate, accumulate_values, bound_series, fractional_revert, shuffle_increments,
    ShuffleScope, TransformConfig,
};

/// One LOBSTER trading day: the message file and its orderbook partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayFiles {
    pub date: String,
    pub message: PathBuf,
    pub orderbook: PathBuf,
}

/// LOBSTER names look like `AAPL_2012-06-21_34200000_57600000_message_10.csv`.
fn parse_lobster_name(name: &str, depth: usize) -> Option<(String, String, String, bool)> {
    let stem = name.strip_suffix(".csv")?;
    let parts: Vec<&str> = stem.split('_').collect();
    if parts.len() != 6 || parts[5] != depth.to_string() {
        return None;
    }
    let is_message = match parts[4] {
        "message" => true,
        "orderbook" => false,
        _ => return None,
    };
    let window = format!("{}_{}", parts[2], parts[3]);
    Some((
        parts[0].to_string(),
        parts[1].to_string(),
        window,
        is_message,
    ))
}

/// Every complete (message, orderbook) pair for `ticker` inside the optional
/// inclusive date range, sorted by date. Half-pairs and an empty result are
/// errors naming what is missing.
pub fn discover_days(
    data_root: &Path,
    ticker: &str,
    depth: usize,
    date_range: Option<&(String, String)>,
) -> Result<Vec<DayFiles>> {
    let entries = fs::read_dir(data_root).map_err(|e| Error::io(data_root, e))?;
    let mut found: BTreeMap<String, (Option<PathBuf>, Option<PathBuf>)> = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(data_root, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some((t, date, _window, is_message)) = parse_lobster_name(&name, depth) else {
            continue;
        };
        if t != ticker {
            continue;
        }
        if let Some((lo, hi)) = date_range {
            if date < *lo || date > *hi {
                continue;
            }
        }
        let slot = found.entry(date).or_default();
        let target = if is_message { &mut slot.0 } else { &mut slot.1 };
        if let Some(prev) = target {
            return Err(Error::param(format!(
                "two files for the same day: {} and {}",
                prev.display(),
                entry.path().display()
            )));
        }
        *target = Some(entry.path());
    }
    let mut days = Vec::new();
    let mut gaps = Vec::new();
    for (date, pair) in found {
        match pair {
            (Some(message), Some(orderbook)) => days.push(DayFiles {
                date,
                message,
                orderbook,
            }),
            (Some(_), None) => gaps.push(format!("{date}: orderbook file missing")),
            (None, Some(_)) => gaps.push(format!("{date}: message file missing")),
            (None, None) => unreachable!(),
        }
    }
    if !gaps.is_empty() {
        return Err(Error::MissingData(format!("{ticker}: {}", gaps.join("; "))));
    }
    if days.is_empty() {
        let range = date_range
            .map(|(a, b)| format!(" between {a} and {b}"))
            .unwrap_or_default();
        return Err(Error::MissingData(format!(
            "{ticker}: no depth-{depth} LOBSTER files in {}{range}",
            data_root.display()
        )));
    }
    Ok(days)
}

fn load_lobster_day(files: &DayFiles, ticker: &str, depth: usize) -> Result<Series> {
    let (messages, book) = rayon::join(
        || parse_messages(&files.message),
        || parse_orderbook(&files.orderbook, depth),
    );
    let (messages, book) = (messages?, book?);
    if messages.len() != book.len() {
        return Err(Error::param(format!(
            "{} has {} rows but {} has {}",
            files.message.display(),
            messages.len(),
            files.orderbook.display(),
            book.len()
        )));
    }
    let meta =
        SeriesMeta::new(ticker, files.orderbook.display().to_string()).with_date(&files.date);
    build_disbalance(&book, meta)
}

fn synthetic_days(stock: &SyntheticStock) -> Result<Vec<Series>> {
    let y = gen_arfima_increments(&stock.spec)?;
    let per_day = stock.spec.length / stock.days;
    let source = format!("synthetic: {}", y.meta.provenance.join(" -> "));
    Ok((0..stock.days)
        .map(|i| {
            let chunk = &y.values[i * per_day..(i + 1) * per_day];
            let mut path = Vec::with_capacity(per_day + 1);
            path.push(0.0);
            path.extend(accumulate_values(chunk, 0.0));
            let meta = SeriesMeta::new(&stock.ticker, source.clone())
                .with_date(format!("day{:03}", i + 1));
            Series::new(path, SeriesKind::Empirical, meta)
        })
        .collect())
}

/// Daily disbalance paths for `ticker`, in date order.
pub fn load_days(config: &RunConfig, ticker: &str) -> Result<Vec<Series>> {
    if let Some(stock) = config.synthetic_stock(ticker) {
        return synthetic_days(stock);
    }
    let files = discover_days(
        &config.data_root,
        ticker,
        config.depth,
        config.date_range.as_ref(),
    )?;
    info!("{ticker}: {} trading days", files.len());
    files
        .par_iter()
        .map(|f| load_lobster_day(f, ticker, config.depth))
        .collect()
}

fn day_path(dir: &Path, day: &Series) -> PathBuf {
    dir.join(format!(
        "{}_{}_disbalance.csv",
        day.meta.ticker,
        day.meta.date_label()
    ))
}

pub fn write_days(dir: &Path, days: &[Series]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    days.iter()
        .map(|d| {
            let p = day_path(dir, d);
            d.write_csv(&p)?;
            Ok(p)
        })
        .collect()
}

/// Reloads the daily paths written by [`write_days`].
pub fn read_days(dir: &Path, ticker: &str) -> Result<Vec<Series>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with(&format!("{ticker}_")) && name.ends_with("_disbalance.csv") {
            paths.push(entry.path());
        }
    }
    if paths.is_empty() {
        return Err(Error::MissingData(format!(
            "{ticker}: no daily series in {}",
            dir.display()
        )));
    }
    paths.sort();
    paths
        .iter()
        .map(|p| Series::read_csv(p, SeriesKind::Empirical))
        .collect()
}

/// The joint series of one stock: Y, Y_R, X, X_R, X_RB, Y_F, X_F.
#[derive(Debug, Clone, PartialEq)]
pub struct StockSeries {
    pub ticker: String,
    pub dates: Vec<String>,
    pub shuffle_seeds: Vec<u64>,
    pub y: Series,
    pub y_r: Series,
    pub x: Series,
    pub x_r: Series,
    pub x_rb: Series,
    pub y_f: Series,
    pub x_f: Series,
}

#[derive(Serialize, Deserialize)]
struct SeriesManifest {
    ticker: String,
    dates: Vec<String>,
    shuffle_seeds: Vec<u64>,
    transform: TransformConfig,
}

const ROLES: [&str; 7] = ["y", "y_r", "x", "x_r", "x_rb", "y_f", "x_f"];

impl StockSeries {
    pub fn label(&self) -> String {
        self.y.meta.date_label()
    }

    pub fn roles(&self) -> [(&'static str, &Series); 7] {
        [
            ("y", &self.y),
            ("y_r", &self.y_r),
            ("x", &self.x),
            ("x_r", &self.x_r),
            ("x_rb", &self.x_rb),
            ("y_f", &self.y_f),
            ("x_f", &self.x_f),
        ]
    }

    /// `ticker_date_role.csv` files plus a `ticker_date_series.json` manifest.
    pub fn write(&self, dir: &Path, transform: &TransformConfig) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let prefix = format!("{}_{}", self.ticker, self.label());
        for (role, s) in self.roles() {
            s.write_csv(&dir.join(format!("{prefix}_{role}.csv")))?;
        }
        let manifest = SeriesManifest {
            ticker: self.ticker.clone(),
            dates: self.dates.clone(),
            shuffle_seeds: self.shuffle_seeds.clone(),
            transform: transform.clone(),
        };
        let path = dir.join(format!("{prefix}_series.json"));
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::json(&path, e))?;
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path, ticker: &str) -> Result<StockSeries> {
        let mut manifests = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.starts_with(&format!("{ticker}_")) && name.ends_with("_series.json") {
                manifests.push(entry.path());
            }
        }
        manifests.sort();
        let path = match manifests.as_slice() {
            [one] => one.clone(),
            [] => {
                return Err(Error::MissingData(format!(
                    "{ticker}: no transformed series in {}",
                    dir.display()
                )))
            }
            _ => {
                return Err(Error::param(format!(
                    "{ticker}: several transformed series sets in {}",
                    dir.display()
                )))
            }
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: SeriesManifest =
            serde_json::from_str(&text).map_err(|e| Error::json(&path, e))?;
        let name = path.file_name().unwrap().to_string_lossy();
        let prefix = name.strip_suffix("_series.json").unwrap().to_string();
        let mut loaded: Vec<Series> = ROLES
            .iter()
            .map(|role| {
                Series::read_csv(
                    &dir.join(format!("{prefix}_{role}.csv")),
                    SeriesKind::Increments,
                )
            })
            .collect::<Result<_>>()?;
        let x_f = loaded.pop().unwrap();
        let y_f = loaded.pop().unwrap();
        let x_rb = loaded.pop().unwrap();
        let x_r = loaded.pop().unwrap();
        let x = loaded.pop().unwrap();
        let y_r = loaded.pop().unwrap();
        let y = loaded.pop().unwrap();
        Ok(StockSeries {
            ticker: manifest.ticker,
            dates: manifest.dates,
            shuffle_seeds: manifest.shuffle_seeds,
            y,
            y_r,
            x,
            x_r,
            x_rb,
            y_f,
            x_f,
        })
    }
}

/// Runs the transform graph on daily paths. Each day is differenced on its
/// own before joining; the shuffle seed comes from [`derive_seed`] keyed by
/// the joint date range or, with [`ShuffleScope::Day`], by each date.
pub fn build_series(
    ticker: &str,
    days: &[Series],
    transform: &TransformConfig,
) -> Result<StockSeries> {
    transform.validate()?;
    if days.is_empty() {
        return Err(Error::MissingData(format!("{ticker}: no trading days")));
    }
    let dates: Vec<String> = days.iter().map(|d| d.meta.date_label()).collect();
    let ys: Vec<Series> = days.par_iter().map(increments).collect::<Result<_>>()?;
    let y = join_daily(&ys)?;
    let (y_r, seeds) = match transform.shuffle_scope {
        ShuffleScope::Joint => {
            let seed = derive_seed(transform.seed, ticker, &y.meta.date_label());
            (shuffle_increments(&y, seed)?, vec![seed])
        }
        ShuffleScope::Day => {
            let seeds: Vec<u64> = dates
                .iter()
                .map(|date| derive_seed(transform.seed, ticker, date))
                .collect();
            let shuffled: Vec<Series> = ys
                .par_iter()
                .zip(&seeds)
                .map(|(y, &seed)| shuffle_increments(y, seed))
                .collect::<Result<_>>()?;
            (join_daily(&shuffled)?, seeds)
        }
    };

    let x = accumulate(&y, 0.0)?;
    let x_r = accumulate(&y_r, 0.0)?;
    let x_rb = bound_series(&y_r, transform.bound, 0.0)?;
    let mut y_f = fractional_revert(&y_r, transform.d, transform.truncation)?;
    if transform.drop_warmup {
        if y_f.len() <= transform.truncation {
            return Err(Error::TooShort {
                needed: transform.truncation + 1,
                got: y_f.len(),
            });
        }
        let kept = y_f.values.split_off(transform.truncation);
        y_f = y_f.derive(
            kept,
            SeriesKind::Reverted,
            format!("drop_warmup({})", transform.truncation),
        );
    }
    let x_f = accumulate(&y_f, 0.0)?;
    Ok(StockSeries {
        ticker: ticker.to_string(),
        dates,
        shuffle_seeds: seeds,
        y,
        y_r,
        x,
        x_r,
        x_rb,
        y_f,
        x_f,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedHistogram {
    pub name: String,
    pub histogram: LogHistogram,
}

#[derive(Debug, Clone)]
pub struct StockAnalysis {
    pub report: StockReport,
    pub series: StockSeries,
    pub histograms: Vec<NamedHistogram>,
}

impl StockAnalysis {
    pub fn label(&self) -> String {
        self.series.label()
    }
}

type CellOut = (Cell, Vec<NamedHistogram>);

fn plain(r: Result<(f64, f64, f64)>) -> CellOut {
    (Cell::from_result(r), Vec::new())
}

fn failed(e: Error) -> CellOut {
    (Cell::failed(e.to_string()), Vec::new())
}

fn hist(name: impl Into<String>, histogram: LogHistogram) -> Vec<NamedHistogram> {
    vec![NamedHistogram {
        name: name.into(),
        histogram,
    }]
}

fn pooled_durations(paths: &[&[f64]], threshold: f64) -> Result<DurationSample> {
    let mut total = durations(paths[0], threshold)?;
    for p in &paths[1..] {
        total.merge(&durations(p, threshold)?);
    }
    Ok(total)
}

struct Job<'a> {
    name: String,
    run: Box<dyn Fn() -> CellOut + Send + Sync + 'a>,
}

fn job<'a>(name: impl Into<String>, run: impl Fn() -> CellOut + Send + Sync + 'a) -> Job<'a> {
    Job {
        name: name.into(),
        run: Box::new(run),
    }
}

/// Every estimator cell of one stock. Cells run concurrently and a failing
/// cell only records its error.
pub fn analyze(days: &[Series], series: StockSeries, config: &RunConfig) -> StockAnalysis {
    let (report, histograms) = estimate(days, &series, config);
    StockAnalysis {
        report,
        series,
        histograms,
    }
}

fn estimate(
    days: &[Series],
    series: &StockSeries,
    config: &RunConfig,
) -> (StockReport, Vec<NamedHistogram>) {
    let est = &config.estimators;
    let day_paths: Vec<&[f64]> = days.iter().map(Series::as_slice).collect();

    let msd = |x: &[f64]| -> Result<(f64, f64, f64)> {
        let lags = msd_lags(x.len(), est.msd_lag_min, est.msd_lag_max, est.msd_lag_count);
        let f = fit_msd_exponent(&sample_msd(x, &lags)?, None)?;
        Ok((f.fit.exponent, f.fit.std_error, f.fit.r_squared))
    };
    let ave = |y: &[f64]| -> Result<(f64, f64, f64)> {
        let f = ave_hurst(y, &ave_block_grid(y.len(), est.max_scale))?;
        Ok((f.exponent, f.std_error, f.r_squared))
    };
    let hig = |x: &[f64]| -> Result<(f64, f64, f64)> {
        let f = higuchi_hurst(x, &higuchi_window_grid(x.len(), est.max_scale))?;
        Ok((f.exponent, f.std_error, f.r_squared))
    };
    let bd = |name: &str, paths: &[&[f64]]| -> CellOut {
        let r = pooled_durations(paths, 0.0)
            .and_then(|s| fit_burst_pdf(&s, est.burst_kind, &est.burst));
        match r {
            Ok(f) => (
                Cell::ok(f.h_bd, f.fit.std_error).with_r_squared(f.fit.r_squared),
                hist(format!("burst_{name}"), f.histogram),
            ),
            Err(e) => failed(e),
        }
    };
    let tail = |name: &str, y: &[f64], side: TailSide| -> CellOut {
        match tail_fit(y, side, &est.tail) {
            Ok(f) => (
                Cell::ok(f.nu, f.fit.std_error).with_r_squared(f.fit.r_squared),
                hist(format!("tail_{name}"), f.histogram),
            ),
            Err(e) => failed(e),
        }
    };
    let hill = |y: &[f64]| -> Result<(f64, f64, f64)> {
        let mut mags = TailSide::Absolute.select(y);
        let k = (mags.len() as f64 * est.tail.tail_fraction).ceil() as usize;
        if k < est.tail.min_tail_samples.max(3) {
            return Err(Error::InsufficientData(format!(
                "{k} tail samples for Hill"
            )));
        }
        mags.sort_by(f64::total_cmp);
        let nu = hill_nu(&mags[mags.len() - k..])
            .ok_or_else(|| Error::DegenerateSeries("flat tail".into()))?;
        Ok((nu, (nu - 1.0) / (k as f64).sqrt(), f64::NAN))
    };

    let s = series;
    let x_rb = [s.x_rb.as_slice()];
    let x_f = [s.x_f.as_slice()];
    let mut jobs: Vec<Job> = vec![
        job("lambda", || plain(msd(&s.x.values))),
        job("lambda_r", || plain(msd(&s.x_r.values))),
        job("lambda_f", || plain(msd(&s.x_f.values))),
        job("h_av", || plain(ave(&s.y.values))),
        job("h_avr", || plain(ave(&s.y_r.values))),
        job("h_avf", || plain(ave(&s.y_f.values))),
        job("h_hig", || plain(hig(&s.x.values))),
        job("h_higr", || plain(hig(&s.x_r.values))),
        job("h_higf", || plain(hig(&s.x_f.values))),
        job("h_bd", || bd("x", &day_paths)),
        job("h_bdr", || bd("x_rb", &x_rb)),
        job("h_bdf", || bd("x_f", &x_f)),
        job("nu", || tail("y", &s.y.values, TailSide::Absolute)),
        job("nu_pos", || tail("y_pos", &s.y.values, TailSide::Positive)),
        job("nu_neg", || tail("y_neg", &s.y.values, TailSide::Negative)),
        job("nu_f", || tail("y_f", &s.y_f.values, TailSide::Absolute)),
        job("nu_hill", || plain(hill(&s.y.values))),
    ];

    // Inter-burst sweeps at multiples of σ; for X, σ is taken over all days.
    let all_x: Vec<f64> = day_paths.iter().flat_map(|p| p.iter().copied()).collect();
    let sigma_x = std_dev(&all_x);
    let sigma_rb = std_dev(&s.x_rb.values);
    let mut sweep_meta = Vec::new();
    for (label, sigma, paths) in [
        ("empirical", sigma_x, &day_paths[..]),
        ("bounded", sigma_rb, &x_rb[..]),
    ] {
        for &m in &config.thresholds {
            let h = m * sigma;
            sweep_meta.push((label, m, h));
            let short = if label == "empirical" { "x" } else { "x_rb" };
            jobs.push(job(format!("sweep_{label}_{m}"), move || {
                let fit = pooled_durations(paths, h)
                    .and_then(|s| fit_burst_pdf(&s, DurationKind::InterBurst, &est.burst));
                match fit {
                    Ok(f) => (
                        Cell::ok(f.eta, f.fit.std_error).with_r_squared(f.fit.r_squared),
                        hist(format!("interburst_{short}_m{m}"), f.histogram),
                    ),
                    Err(e) => failed(e),
                }
            }));
        }
    }

    let results: Vec<(String, CellOut)> = jobs
        .par_iter()
        .map(|j| (j.name.clone(), (j.run)()))
        .collect();

    let mut report = StockReport {
        ticker: s.ticker.clone(),
        dates: s.dates.clone(),
        shuffle_seeds: s.shuffle_seeds.clone(),
        n_increments: s.y.len(),
        ..Default::default()
    };
    let mut histograms = Vec::new();
    let mut sweep_cells = Vec::new();
    for (name, (cell, hs)) in results {
        if let Some(e) = &cell.error {
            debug!("{}: {name} failed: {e}", s.ticker);
        }
        histograms.extend(hs);
        let slot = match name.as_str() {
            "lambda" => &mut report.lambda,
            "lambda_r" => &mut report.lambda_r,
            "lambda_f" => &mut report.lambda_f,
            "h_av" => &mut report.h_av,
            "h_avr" => &mut report.h_avr,
            "h_avf" => &mut report.h_avf,
            "h_hig" => &mut report.h_hig,
            "h_higr" => &mut report.h_higr,
            "h_higf" => &mut report.h_higf,
            "h_bd" => &mut report.h_bd,
            "h_bdr" => &mut report.h_bdr,
            "h_bdf" => &mut report.h_bdf,
            "nu" => &mut report.nu,
            "nu_pos" => &mut report.nu_pos,
            "nu_neg" => &mut report.nu_neg,
            "nu_f" => &mut report.nu_f,
            "nu_hill" => &mut report.nu_hill,
            _ => {
                sweep_cells.push(cell);
                continue;
            }
        };
        *slot = cell;
    }
    report.sweeps = sweep_meta
        .into_iter()
        .zip(sweep_cells)
        .map(|((label, m, h), cell)| {
            let paths = if label == "empirical" {
                &day_paths[..]
            } else {
                &x_rb[..]
            };
            SweepCell {
                series: label.to_string(),
                multiplier: m,
                threshold: h,
                n_interbursts: pooled_durations(paths, h).map_or(0, |d| d.interbursts.len()),
                eta: cell,
            }
        })
        .collect();
    report.derive();
    (report, histograms)
}

/// Full graph for one ticker.
pub fn run_stock(config: &RunConfig, ticker: &str) -> Result<StockAnalysis> {
    let days = load_days(config, ticker)?;
    let series = build_series(ticker, &days, &config.transform)?;
    Ok(analyze(&days, series, config))
}

#[derive(Debug)]
pub struct RunOutcome {
    /// Successful stocks, in ticker order.
    pub analyses: Vec<StockAnalysis>,
    /// Stocks that produced no report at all.
    pub failures: Vec<(String, Error)>,
    /// `None` when fewer than two stocks succeeded.
    pub summary: Option<Summary>,
}

/// Runs every ticker on a pool of `config.jobs` workers (all cores when unset).
pub fn run_all(config: &RunConfig, tickers: &[String]) -> Result<RunOutcome> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::param(format!("worker pool: {e}")))?;
    let results: Vec<(String, Result<StockAnalysis>)> = pool.install(|| {
        tickers
            .par_iter()
            .map(|t| (t.clone(), run_stock(config, t)))
            .collect()
    });
    let mut analyses = Vec::new();
    let mut failures = Vec::new();
    for (t, r) in results {
        match r {
            Ok(a) => analyses.push(a),
            Err(e) => failures.push((t, e)),
        }
    }
    let reports: Vec<StockReport> = analyses.iter().map(|a| a.report.clone()).collect();
    let summary = aggregate(&reports).ok();
    Ok(RunOutcome {
        analyses,
        failures,
        summary,
    })
}
