use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use flsm_core::burst::{durations, fit_burst_pdf, threshold_sweep, DurationKind, DurationSample};
use flsm_core::estimators::{
    ave_block_grid, ave_hurst, fit_msd_exponent, higuchi_hurst, higuchi_window_grid, msd_lags,
    sample_msd, tail_fit, TailSide,
};
use flsm_core::pipeline::{
    aggregate, analyze, build_series, export_run, load_days, read_days, read_reports, run_all,
    write_days, write_stock, write_tables, ErrorEntry, RunConfig, StockSeries,
};
use flsm_core::synth::{gen_arfima, GenSpec, Noise};
use flsm_core::transform::accumulate_values;
use flsm_core::Series;
use log::info;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Command, Global, Law, Outcome, Stage, Treat};

/// Config file (or defaults) with command-line overrides applied.
pub fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.transform.seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.out_dir = out.clone();
    }
    if g.jobs.is_some() {
        cfg.jobs = g.jobs;
    }
    if let Some(list) = &g.tickers {
        let mut seen = Vec::new();
        for t in list.iter().map(|t| t.trim()).filter(|t| !t.is_empty()) {
            if !seen.iter().any(|s: &String| s == t) {
                seen.push(t.to_string());
            }
        }
        cfg.synthetic.retain(|s| seen.contains(&s.ticker));
        cfg.tickers = seen
            .into_iter()
            .filter(|t| cfg.synthetic_stock(t).is_none())
            .collect();
    }
    Ok(cfg)
}

pub fn dispatch(cmd: &Command, g: &Global, cfg: &RunConfig) -> Result<Outcome> {
    if g.stage.is_some() && !matches!(cmd, Command::RunAll) {
        bail!("--stage only applies to run-all");
    }
    if let Some(n) = cfg.jobs {
        // Ignore the error raised when a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match cmd {
        Command::Ingest => per_ticker(cfg, "ingest", ingest_one),
        Command::Transform => per_ticker(cfg, "transform", transform_one),
        Command::Generate {
            law: Some(law),
            sigma,
            alpha,
            nu,
            d,
            length,
            name,
        } => {
            let noise = match law {
                Law::Gaussian => Noise::Gaussian { sigma: *sigma },
                Law::Stable => Noise::Stable {
                    alpha: *alpha,
                    scale: *sigma,
                },
                Law::Pareto => Noise::ParetoSymmetric {
                    nu: *nu,
                    x_min: *sigma,
                },
            };
            generate_one(
                cfg,
                GenSpec::new(noise, *d, *length, cfg.transform.seed),
                name,
            )
        }
        Command::Generate { law: None, .. } => {
            if cfg.synthetic.is_empty() {
                bail!("generate needs --law or synthetic stocks in the config");
            }
            per_ticker(cfg, "generate", ingest_one)
        }
        Command::Estimate {
            input: Some(p),
            treat,
        } => estimate_file(cfg, p, *treat),
        Command::Estimate { input: None, .. } => estimate_staged(cfg),
        Command::Burst { input, thresholds } => {
            let mut cfg = cfg.clone();
            if let Some(t) = thresholds {
                cfg.thresholds = t.clone();
            }
            match input {
                Some(p) => burst_file(&cfg, p),
                None => per_ticker(&cfg, "burst", burst_one),
            }
        }
        Command::Report => report(cfg),
        Command::RunAll => match g.stage {
            None => run_everything(cfg),
            Some(stop) => run_staged(cfg, stop),
        },
    }
}

fn tickers(cfg: &RunConfig) -> Result<Vec<String>> {
    let t = cfg.all_tickers();
    if t.is_empty() {
        bail!("no tickers: pass --tickers or list them in the config");
    }
    Ok(t)
}

fn days_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("days")
}

fn series_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("series")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The error chain joined by ": ", skipping causes the previous message
/// already quotes.
pub fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

/// Runs `f` for every ticker; a failing ticker is recorded and the rest go on.
fn per_ticker(
    cfg: &RunConfig,
    stage: &str,
    f: fn(&RunConfig, &str) -> Result<Vec<ErrorEntry>>,
) -> Result<Outcome> {
    cfg.validate()?;
    let mut outcome = Outcome::ok();
    for t in tickers(cfg)? {
        match f(cfg, &t) {
            Ok(cell_errors) => outcome.errors.extend(cell_errors),
            Err(e) => {
                outcome.fatal = true;
                outcome.errors.push(ErrorEntry {
                    ticker: Some(t.clone()),
                    cell: Some(stage.to_string()),
                    message: describe(&e),
                });
            }
        }
    }
    Ok(outcome)
}

fn ingest_one(cfg: &RunConfig, ticker: &str) -> Result<Vec<ErrorEntry>> {
    let days = load_days(cfg, ticker)?;
    let written = write_days(&days_dir(cfg), &days)?;
    info!("{ticker}: wrote {} daily series", written.len());
    Ok(Vec::new())
}

fn transform_one(cfg: &RunConfig, ticker: &str) -> Result<Vec<ErrorEntry>> {
    let days = read_days(&days_dir(cfg), ticker)?;
    let series = build_series(ticker, &days, &cfg.transform)?;
    series.write(&series_dir(cfg), &cfg.transform)?;
    Ok(Vec::new())
}

fn estimate_one(cfg: &RunConfig, ticker: &str) -> Result<Vec<ErrorEntry>> {
    let days = read_days(&days_dir(cfg), ticker)?;
    let series = StockSeries::read(&series_dir(cfg), ticker)?;
    let analysis = analyze(&days, series, cfg);
    write_stock(&cfg.out_dir, &analysis, cfg)?;
    Ok(analysis
        .report
        .failures()
        .into_iter()
        .map(|(cell, message)| ErrorEntry {
            ticker: Some(ticker.to_string()),
            cell: Some(cell),
            message,
        })
        .collect())
}

fn estimate_staged(cfg: &RunConfig) -> Result<Outcome> {
    per_ticker(cfg, "estimate", estimate_one)
}

fn report(cfg: &RunConfig) -> Result<Outcome> {
    let reports = read_reports(&cfg.out_dir)?;
    if reports.is_empty() {
        bail!("no *_report.json files in {}", cfg.out_dir.display());
    }
    let summary = aggregate(&reports).ok();
    let errors: Vec<ErrorEntry> = reports
        .iter()
        .flat_map(|r| {
            r.failures().into_iter().map(|(cell, message)| ErrorEntry {
                ticker: Some(r.ticker.clone()),
                cell: Some(cell),
                message,
            })
        })
        .collect();
    write_tables(&cfg.out_dir, &reports, summary.as_ref(), cfg, &errors)?;
    Ok(Outcome {
        errors,
        fatal: false,
    })
}

fn run_everything(cfg: &RunConfig) -> Result<Outcome> {
    let outcome = run_all(cfg, &tickers(cfg)?)?;
    let fatal = !outcome.failures.is_empty();
    let errors = export_run(&cfg.out_dir, &outcome, cfg)?;
    Ok(Outcome { errors, fatal })
}

type StockStep = fn(&RunConfig, &str) -> Result<Vec<ErrorEntry>>;

fn run_staged(cfg: &RunConfig, stop: Stage) -> Result<Outcome> {
    let mut all = Outcome::ok();
    let steps: [(Stage, &str, StockStep); 3] = [
        (Stage::Ingest, "ingest", ingest_one),
        (Stage::Transform, "transform", transform_one),
        (Stage::Estimate, "estimate", estimate_one),
    ];
    for (stage, name, f) in steps {
        let o = per_ticker(cfg, name, f)?;
        all.errors.extend(o.errors);
        all.fatal |= o.fatal;
        if stage == stop || all.fatal {
            return Ok(all);
        }
    }
    let o = report(cfg)?;
    all.errors = o.errors;
    Ok(all)
}

fn generate_one(cfg: &RunConfig, spec: GenSpec, name: &str) -> Result<Outcome> {
    let mut path = gen_arfima(&spec)?;
    path.meta.ticker = name.to_string();
    let file = cfg
        .out_dir
        .join("generated")
        .join(format!("{}.csv", path.file_stem()));
    fs::create_dir_all(file.parent().unwrap())?;
    path.write_csv(&file)?;
    println!("{}", file.display());
    Ok(Outcome::ok())
}

fn fit_value<T: Serialize>(r: flsm_core::Result<T>) -> (Value, Option<String>) {
    match r {
        Ok(v) => (serde_json::to_value(v).expect("fit serializes"), None),
        Err(e) => (json!({ "error": e.to_string() }), Some(e.to_string())),
    }
}

/// Path and increments of a series file, interpreted per `treat`.
fn path_and_steps(series: &Series, treat: Option<Treat>) -> (Vec<f64>, Vec<f64>) {
    let as_path = match treat {
        Some(Treat::Path) => true,
        Some(Treat::Increments) => false,
        None => series.kind.is_path() || series.kind == flsm_core::SeriesKind::Synthetic,
    };
    if as_path {
        let steps = series.values.windows(2).map(|w| w[1] - w[0]).collect();
        (series.values.clone(), steps)
    } else {
        (
            accumulate_values(&series.values, 0.0),
            series.values.clone(),
        )
    }
}

fn single_series_errors(stem: &str, fits: &[(&str, Option<String>)]) -> Vec<ErrorEntry> {
    fits.iter()
        .filter_map(|(name, e)| {
            e.as_ref().map(|m| ErrorEntry {
                ticker: Some(stem.to_string()),
                cell: Some(name.to_string()),
                message: m.clone(),
            })
        })
        .collect()
}

fn estimate_file(cfg: &RunConfig, input: &Path, treat: Option<Treat>) -> Result<Outcome> {
    let series = Series::read_csv(input, flsm_core::SeriesKind::Increments)?;
    let (x, y) = path_and_steps(&series, treat);
    let est = &cfg.estimators;
    let lags = msd_lags(x.len(), est.msd_lag_min, est.msd_lag_max, est.msd_lag_count);
    let (msd, e_msd) = fit_value(sample_msd(&x, &lags).and_then(|m| fit_msd_exponent(&m, None)));
    let (ave, e_ave) = fit_value(ave_hurst(&y, &ave_block_grid(y.len(), est.max_scale)));
    let (hig, e_hig) = fit_value(higuchi_hurst(
        &x,
        &higuchi_window_grid(x.len(), est.max_scale),
    ));
    let (tail, e_tail) = fit_value(tail_fit(&y, TailSide::Absolute, &est.tail));
    let stem = series.file_stem();
    let out = cfg.out_dir.join(format!("{stem}_fits.json"));
    write_json(
        &out,
        &json!({
            "input": input.display().to_string(),
            "estimators": est,
            "msd": msd,
            "ave": ave,
            "higuchi": hig,
            "tail": tail,
        }),
    )?;
    println!("{}", out.display());
    Ok(Outcome {
        errors: single_series_errors(
            &stem,
            &[
                ("msd", e_msd),
                ("ave", e_ave),
                ("higuchi", e_hig),
                ("tail", e_tail),
            ],
        ),
        fatal: false,
    })
}

fn burst_json(
    sample: flsm_core::Result<DurationSample>,
    which: DurationKind,
    cfg: &RunConfig,
) -> (Value, Option<String>) {
    let counts = sample.as_ref().ok().map(|s| {
        json!({
            "threshold": s.threshold,
            "bursts": s.bursts.len(),
            "interbursts": s.interbursts.len(),
            "discarded_edges": s.discarded_edges,
        })
    });
    let (fit, err) =
        fit_value(sample.and_then(|s| fit_burst_pdf(&s, which, &cfg.estimators.burst)));
    (json!({ "sample": counts, "fit": fit }), err)
}

fn burst_file(cfg: &RunConfig, input: &Path) -> Result<Outcome> {
    let series = Series::read_csv(input, flsm_core::SeriesKind::Increments)?;
    let (x, _) = path_and_steps(&series, None);
    let stem = series.file_stem();
    let mut errors = Vec::new();
    let (zero, e) = burst_json(durations(&x, 0.0), cfg.estimators.burst_kind, cfg);
    errors.push(("burst_zero".to_string(), e));
    let mut sweeps = Vec::new();
    match threshold_sweep(&x, &cfg.thresholds) {
        Ok(samples) => {
            for (m, s) in samples {
                let (v, e) = burst_json(Ok(s), DurationKind::InterBurst, cfg);
                sweeps.push(json!({ "multiplier": m, "interburst": v }));
                errors.push((format!("sweep_{m}"), e));
            }
        }
        Err(e) => errors.push(("sweep".to_string(), Some(e.to_string()))),
    }
    let out = cfg.out_dir.join(format!("{stem}_burst.json"));
    write_json(
        &out,
        &json!({
            "input": input.display().to_string(),
            "config": cfg.estimators.burst,
            "zero_threshold": zero,
            "sweeps": sweeps,
        }),
    )?;
    println!("{}", out.display());
    let named: Vec<(&str, Option<String>)> = errors
        .iter()
        .map(|(n, e)| (n.as_str(), e.clone()))
        .collect();
    Ok(Outcome {
        errors: single_series_errors(&stem, &named),
        fatal: false,
    })
}

fn burst_one(cfg: &RunConfig, ticker: &str) -> Result<Vec<ErrorEntry>> {
    let days = read_days(&days_dir(cfg), ticker)?;
    let series = StockSeries::read(&series_dir(cfg), ticker)?;
    let mut pooled: Option<DurationSample> = None;
    for d in &days {
        let s = durations(&d.values, 0.0)?;
        match pooled.as_mut() {
            Some(p) => p.merge(&s),
            None => pooled = Some(s),
        }
    }
    let kind = cfg.estimators.burst_kind;
    let mut named = Vec::new();
    let mut body = serde_json::Map::new();
    for (name, sample) in [
        ("x", pooled.ok_or(flsm_core::Error::EmptyInput)),
        ("x_rb", durations(&series.x_rb.values, 0.0)),
        ("x_f", durations(&series.x_f.values, 0.0)),
    ] {
        let (v, e) = burst_json(sample, kind, cfg);
        body.insert(name.to_string(), v);
        named.push((format!("burst_{name}"), e));
    }
    let out = cfg
        .out_dir
        .join(format!("{ticker}_{}_burst.json", series.label()));
    write_json(&out, &Value::Object(body))?;
    Ok(named
        .into_iter()
        .filter_map(|(cell, e)| {
            e.map(|message| ErrorEntry {
                ticker: Some(ticker.to_string()),
                cell: Some(cell),
                message,
            })
        })
        .collect())
}
