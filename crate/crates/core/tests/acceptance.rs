//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS / FAIL / SKIP line even when the others succeed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use flsm_core::burst::{durations, fit_burst_pdf, std_dev, BurstFitConfig, DurationKind};
use flsm_core::estimators::{
    ave_block_grid, ave_hurst, default_msd_lags, fit_msd_exponent, higuchi_hurst,
    higuchi_window_grid, sample_msd, tail_fit, TailConfig, TailSide,
};
use flsm_core::lob::{
    build_disbalance, disbalance_values, parse_messages_from, parse_orderbook_from, Direction,
    EventTime, EventType, Level, LobEvent,
};
use flsm_core::pipeline::{run_stock, RunConfig};
use flsm_core::synth::{gen_arfima, gen_arfima_increments, gen_noise, GenSpec, Noise};
use flsm_core::transform::{
    accumulate_values, fractional_revert_values, fractional_weights, shuffle_increments,
};
use flsm_core::{Error, Series, SeriesKind, SeriesMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::gamma::gamma;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: Option<bool>,
    detail: String,
}

impl Verdict {
    fn check(pass: bool, detail: String) -> Self {
        Verdict {
            pass: Some(pass),
            detail,
        }
    }

    fn skip(detail: impl Into<String>) -> Self {
        Verdict {
            pass: None,
            detail: detail.into(),
        }
    }
}

const SEEDS: [u64; 8] = [1, 2, 3, 4, 5, 6, 7, 8];
const N17: usize = 1 << 17;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn msd_lambda(x: &[f64]) -> f64 {
    let msd = sample_msd(x, &default_msd_lags(x.len())).unwrap();
    fit_msd_exponent(&msd, None).unwrap().fit.exponent
}

fn ave_h(y: &[f64], max_scale: Option<usize>) -> f64 {
    ave_hurst(y, &ave_block_grid(y.len(), max_scale))
        .unwrap()
        .exponent
}

fn higuchi_h(x: &[f64], max_scale: Option<usize>) -> f64 {
    higuchi_hurst(x, &higuchi_window_grid(x.len(), max_scale))
        .unwrap()
        .exponent
}

fn steps(values: Vec<f64>) -> Series {
    Series::from_values(values, SeriesKind::Increments)
}

fn worst_deviation(values: &[f64], target: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max)
}

fn msd_memory_law() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [-0.3, -0.1, 0.0, 0.2] {
        let lambdas: Vec<f64> = SEEDS
            .par_iter()
            .map(|&seed| {
                let spec = GenSpec::new(Noise::Gaussian { sigma: 1.0 }, d, N17, seed);
                msd_lambda(&gen_arfima(&spec).unwrap().values)
            })
            .collect();
        let target = 2.0 * d + 1.0;
        let worst = worst_deviation(&lambdas, target);
        ok &= worst <= 0.1;
        parts.push(format!(
            "d={d}: mean λ={:.3} (target {target:.1}, worst seed off by {worst:.3})",
            mean(&lambdas)
        ));
    }
    Verdict::check(ok, parts.join("; "))
}

/// (α, d) grid shared by the Hurst-law and shuffle checks.
const CASES: [(f64, f64); 4] = [(2.0, 0.0), (2.0, -0.3), (1.5, 0.0), (1.5, -0.3)];

fn stable(alpha: f64) -> Noise {
    if alpha == 2.0 {
        Noise::Gaussian { sigma: 1.0 }
    } else {
        Noise::Stable { alpha, scale: 1.0 }
    }
}

fn hurst_law() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, d) in CASES {
        let tol = if alpha == 2.0 { 0.05 } else { 0.07 };
        let target = d + 1.0 / alpha;
        let fits: Vec<(f64, f64)> = SEEDS
            .par_iter()
            .map(|&seed| {
                let spec = GenSpec::new(stable(alpha), d, N17, seed);
                let y = gen_arfima_increments(&spec).unwrap().values;
                let x = accumulate_values(&y, 0.0);
                (ave_h(&y, None), higuchi_h(&x, None))
            })
            .collect();
        let av: Vec<f64> = fits.iter().map(|f| f.0).collect();
        let hig: Vec<f64> = fits.iter().map(|f| f.1).collect();
        let w_av = worst_deviation(&av, target);
        let w_hig = worst_deviation(&hig, target);
        ok &= w_av <= tol && w_hig <= tol;
        parts.push(format!(
            "α={alpha} d={d}: H_AV={:.3} H_Hig={:.3} vs {target:.3} (worst {w_av:.3}/{w_hig:.3}, tol {tol})",
            mean(&av),
            mean(&hig)
        ));
    }
    Verdict::check(ok, parts.join("; "))
}

fn shuffle_destroys_memory() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, d) in CASES {
        let target = 1.0 / alpha;
        let fits: Vec<(f64, f64)> = SEEDS
            .par_iter()
            .map(|&seed| {
                let spec = GenSpec::new(stable(alpha), d, N17, seed);
                let y = gen_arfima_increments(&spec).unwrap();
                let yr = shuffle_increments(&steps(y.values), seed + 100).unwrap();
                let xr = accumulate_values(&yr.values, 0.0);
                (msd_lambda(&xr), ave_h(&yr.values, None))
            })
            .collect();
        let lam: Vec<f64> = fits.iter().map(|f| f.0).collect();
        let hav: Vec<f64> = fits.iter().map(|f| f.1).collect();
        let w_lam = worst_deviation(&lam, 1.0);
        let w_av = worst_deviation(&hav, target);
        ok &= w_lam <= 0.05 && w_av <= 0.05;
        parts.push(format!(
            "α={alpha} d={d}: λ_R={:.3} H_AVR={:.3} vs {target:.3} (worst {w_lam:.3}/{w_av:.3})",
            mean(&lam),
            mean(&hav)
        ));
    }
    Verdict::check(ok, parts.join("; "))
}

fn gaussian_walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    accumulate_values(&y, 0.0)
}

fn sparre_andersen() -> Verdict {
    let cfg = BurstFitConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pooled = durations(&gaussian_walk(&mut rng, 1000), 0.0).unwrap();
    for _ in 1..1000 {
        pooled.merge(&durations(&gaussian_walk(&mut rng, 1000), 0.0).unwrap());
    }
    let fit = fit_burst_pdf(&pooled, DurationKind::Burst, &cfg).unwrap();
    let ok = (fit.eta - 1.5).abs() <= 0.1;

    let single = durations(&gaussian_walk(&mut rng, 1_000_000), 0.0).unwrap();
    let diag = match fit_burst_pdf(&single, DurationKind::Burst, &cfg) {
        Ok(f) => format!("η={:.3} from {} bursts", f.eta, f.n_durations),
        Err(e) => format!("no fit ({e})"),
    };
    Verdict::check(
        ok,
        format!(
            "1000 walks x 1000 ticks: η={:.3} ± {:.3} from {} bursts, r²={:.3}; single 10^6 walk (not gating): {diag}",
            fit.eta, fit.fit.std_error, fit.n_durations, fit.fit.r_squared
        ),
    )
}

fn reversion_round_trip() -> Verdict {
    let max_scale = Some(1000);
    let tail_cfg = TailConfig::default();
    let runs: Vec<(f64, f64, f64, f64)> = [11u64, 12, 13, 14]
        .par_iter()
        .map(|&seed| {
            let spec = GenSpec::new(
                Noise::ParetoSymmetric {
                    nu: 3.0,
                    x_min: 1.0,
                },
                -0.3,
                N17,
                seed,
            );
            let y = gen_arfima_increments(&spec).unwrap();
            let yr = shuffle_increments(&steps(y.values.clone()), seed)
                .unwrap()
                .values;
            let yf = fractional_revert_values(&yr, -0.3, 1000).unwrap();
            let (xr, xf) = (accumulate_values(&yr, 0.0), accumulate_values(&yf, 0.0));
            let shift_av = ave_h(&yf, max_scale) - ave_h(&yr, max_scale);
            let shift_hig = higuchi_h(&xf, max_scale) - higuchi_h(&xr, max_scale);
            let nu_y = tail_fit(&y.values, TailSide::Absolute, &tail_cfg)
                .unwrap()
                .nu;
            let nu_f = tail_fit(&yf, TailSide::Absolute, &tail_cfg).unwrap().nu;
            (shift_av, shift_hig, nu_y, nu_f)
        })
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (sa, sh, ny, nf) in &runs {
        ok &= (sa + 0.3).abs() <= 0.05 && (sh + 0.3).abs() <= 0.05 && (ny - nf).abs() <= 0.15;
        parts.push(format!(
            "ΔH_AV={sa:.3} ΔH_Hig={sh:.3} ν={ny:.2}/ν_F={nf:.2}"
        ));
    }
    Verdict::check(ok, parts.join("; "))
}

fn exact_cases() -> Verdict {
    let mut failures = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let z: Vec<f64> = (0..5000).map(|_| rng.random::<f64>() - 0.5).collect();
    if fractional_revert_values(&z, 0.0, 1000).unwrap() != z {
        failures.push("d=0 reversion is not the identity".to_string());
    }

    let flat = vec![3.25; 2000];
    let msd = sample_msd(&flat, &default_msd_lags(flat.len())).unwrap();
    if msd.iter().any(|&(_, m)| m != 0.0) {
        failures.push("constant series has nonzero MSD".to_string());
    }

    let ramp: Vec<f64> = (0..10_000).map(|i| 0.5 * i as f64 - 7.0).collect();
    let lambda = msd_lambda(&ramp);
    if (lambda - 2.0).abs() > 1e-9 {
        failures.push(format!("ramp λ = {lambda}"));
    }
    let d_hig = 2.0 - higuchi_h(&ramp, None);
    if (d_hig - 1.0).abs() > 1e-9 {
        failures.push(format!("ramp Higuchi D = {d_hig}"));
    }

    let w = fractional_weights(-0.3, 4).unwrap();
    for (j, want) in [(1, -0.3), (2, -0.105), (3, -0.0595)] {
        let oracle = gamma(j as f64 - 0.3) / (gamma(-0.3) * gamma(j as f64 + 1.0));
        if (w[j] - oracle).abs() > 1e-10 || (w[j] - want).abs() > 1e-10 {
            failures.push(format!("w_{j} = {} (oracle {oracle}, table {want})", w[j]));
        }
    }

    let detail = if failures.is_empty() {
        format!(
            "identity, flat MSD, ramp λ={lambda:.12} D={d_hig:.12}, weights -0.3/-0.105/-0.0595"
        )
    } else {
        failures.join("; ")
    };
    Verdict::check(failures.is_empty(), detail)
}

fn tail_oracle() -> Verdict {
    let cfg = TailConfig::default();
    let fits: Vec<(f64, f64, f64)> = [2.25, 3.0, 3.86]
        .par_iter()
        .map(|&nu| {
            let spec = GenSpec::new(
                Noise::ParetoSymmetric { nu, x_min: 1.0 },
                0.0,
                1_000_000,
                31,
            );
            let y = gen_noise(&spec).unwrap();
            let f = tail_fit(&y.values, TailSide::Absolute, &cfg).unwrap();
            (nu, f.nu, f.hill_nu)
        })
        .collect();
    let ok = fits.iter().all(|(nu, fit, _)| (fit - nu).abs() <= 0.15);
    let detail = fits
        .iter()
        .map(|(nu, fit, hill)| format!("ν={nu}: fit {fit:.3}, Hill {hill:.3}"))
        .collect::<Vec<_>>()
        .join("; ");
    Verdict::check(ok, detail)
}

fn burst_partition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for i in 0..1000 {
        let n = rng.random_range(1..3000);
        let heavy = i % 2 == 1;
        let y: Vec<f64> = (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                if heavy {
                    g / rng.random::<f64>().max(1e-9)
                } else {
                    g
                }
            })
            .collect();
        let x = accumulate_values(&y, 0.0);
        let sigma = std_dev(&x);
        for m in [0.0, 0.5, 1.0, 1.5] {
            let s = durations(&x, m * sigma).unwrap();
            checked += 1;
            if s.total_ticks() != (n - 1) as u64 {
                bad.push(format!(
                    "series {i} m={m}: {} != {}",
                    s.total_ticks(),
                    n - 1
                ));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{checked} (series, threshold) pairs partition exactly")
    } else {
        bad.into_iter().take(5).collect::<Vec<_>>().join("; ")
    };
    Verdict::check(detail.ends_with("exactly"), detail)
}

const FIXTURE_MESSAGES: &str = "\
34200.004241176,1,16113575,18,5853300,1
34200.005580700,1,16120456,18,5859100,-1
34200.011641011,3,16120456,18,5859100,-1
34200.025551813,4,16113575,10,5853300,1
34200.19,5,0,100,5853200,-1
";

const FIXTURE_BOOK: &str = "\
5859400,200,5853600,18,5859500,100,5853300,50
5859100,18,5853600,18,5859400,200,5853300,50
5859400,200,5853600,18,5859500,100,5853300,50
5859400,200,5853600,8,5859500,100,5853300,50
5859400,200,5853600,8,5859500,100,5853300,50
";

fn parser_fixtures() -> Verdict {
    let mut failures = Vec::new();
    let ev = |t: &str, ty, id, size, price, dir| LobEvent {
        time: EventTime {
            nanos: (t.parse::<f64>().unwrap() * 1e9).round() as u64,
            frac_digits: t.split('.').nth(1).map_or(0, |f| f.len() as u8),
        },
        event_type: ty,
        order_id: id,
        size,
        price,
        direction: dir,
    };
    let expected = vec![
        ev(
            "34200.004241176",
            EventType::Submission,
            16113575,
            18,
            5853300,
            Direction::Buy,
        ),
        ev(
            "34200.005580700",
            EventType::Submission,
            16120456,
            18,
            5859100,
            Direction::Sell,
        ),
        ev(
            "34200.011641011",
            EventType::Deletion,
            16120456,
            18,
            5859100,
            Direction::Sell,
        ),
        ev(
            "34200.025551813",
            EventType::ExecutionVisible,
            16113575,
            10,
            5853300,
            Direction::Buy,
        ),
        ev(
            "34200.19",
            EventType::ExecutionHidden,
            0,
            100,
            5853200,
            Direction::Sell,
        ),
    ];
    match parse_messages_from(FIXTURE_MESSAGES.as_bytes(), "fixture") {
        Ok(events) if events == expected => {
            let text: String = events.iter().map(|e| e.to_csv_row() + "\n").collect();
            if text != FIXTURE_MESSAGES {
                failures.push("message rows do not re-serialize verbatim".to_string());
            }
        }
        Ok(events) => failures.push(format!("messages parsed to {events:?}")),
        Err(e) => failures.push(format!("messages: {e}")),
    }

    match parse_orderbook_from(FIXTURE_BOOK.as_bytes(), 2, "fixture") {
        Ok(book) => {
            if book[1].levels[0]
                != (Level {
                    ask_price: 5859100,
                    ask_size: 18,
                    bid_price: 5853600,
                    bid_size: 18,
                })
            {
                failures.push(format!("row 2 level 1 parsed to {:?}", book[1].levels[0]));
            }
            // (18 + 50) − (200 + 100), (18 + 50) − (18 + 200), ...
            let hand = vec![-232, -150, -232, -242, -242];
            if disbalance_values(&book) != hand {
                failures.push(format!("disbalance {:?}", disbalance_values(&book)));
            }
            let series = build_disbalance(&book, SeriesMeta::default()).unwrap();
            if series.values != hand.iter().map(|&v| v as f64).collect::<Vec<_>>() {
                failures.push("disbalance series differs from hand sums".to_string());
            }
        }
        Err(e) => failures.push(format!("orderbook: {e}")),
    }

    let bad_rows = [
        (
            parse_messages_from("34200.1,1,1,5,100,1\n34200.2,1,2,5,100\n".as_bytes(), "m"),
            "m:2:",
        ),
        (
            parse_messages_from(
                "34200.1,1,1,5,100,1\n\n34200.2,9,2,5,100,1\n".as_bytes(),
                "m",
            ),
            "m:3:",
        ),
        (
            parse_messages_from("34200.2,1,1,5,100,1\n34200.1,1,2,5,100,1\n".as_bytes(), "m"),
            "m:2:",
        ),
    ];
    for (result, prefix) in bad_rows {
        match result {
            Err(e @ Error::Parse { .. }) if e.to_string().starts_with(prefix) => {}
            other => failures.push(format!("expected {prefix} error, got {other:?}")),
        }
    }
    let bad_books = [
        ("1,2,3,4\n1,2,x,4\n", 1, "b:2:"),
        ("1,2,3,4\n1,2,3,4\n1,2,3\n", 1, "b:3:"),
        ("1,-2,3,4\n", 1, "b:1:"),
    ];
    for (text, depth, prefix) in bad_books {
        match parse_orderbook_from(text.as_bytes(), depth, "b") {
            Err(e @ Error::Parse { .. }) if e.to_string().starts_with(prefix) => {}
            other => failures.push(format!("expected {prefix} error, got {other:?}")),
        }
    }

    let detail = if failures.is_empty() {
        "5 events and 5 snapshots parse exactly; disbalance matches hand sums; 6 malformed inputs name their line".to_string()
    } else {
        failures.join("; ")
    };
    Verdict::check(failures.is_empty(), detail)
}

fn lobster_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("FLSM_LOBSTER_DIR") {
        return Some(PathBuf::from(dir));
    }
    let local = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/lobster");
    local.is_dir().then_some(local)
}

/// (ticker, depth) pairs present as LOBSTER orderbook files.
fn lobster_stocks(dir: &Path) -> Vec<(String, usize)> {
    let mut found: Vec<(String, usize)> = std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| {
                let name = e.ok()?.file_name().into_string().ok()?;
                let stem = name.strip_suffix(".csv")?;
                let (head, depth) = stem.rsplit_once("_orderbook_")?;
                let ticker = head.split('_').next()?.to_string();
                Some((ticker, depth.parse().ok()?))
            })
            .collect()
        })
        .unwrap_or_default();
    found.sort();
    found.dedup();
    found
}

fn lobster_sample() -> Verdict {
    let Some(dir) = lobster_dir() else {
        return Verdict::skip(
            "no LOBSTER sample files (set FLSM_LOBSTER_DIR or add tests/data/lobster)",
        );
    };
    let stocks = lobster_stocks(&dir);
    if stocks.is_empty() {
        return Verdict::skip(format!("no LOBSTER orderbook files in {}", dir.display()));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (ticker, depth) in stocks {
        let config = RunConfig {
            data_root: dir.clone(),
            tickers: vec![ticker.clone()],
            depth,
            ..RunConfig::default()
        };
        let report = match run_stock(&config, &ticker) {
            Ok(a) => a.report,
            Err(e) => {
                ok = false;
                parts.push(format!("{ticker}: {e}"));
                continue;
            }
        };
        let mut problems = Vec::new();
        match report.lambda.value {
            Some(l) if l > 0.0 && l < 2.0 => {}
            other => problems.push(format!("λ={other:?}")),
        }
        for (name, cell) in [
            ("h_av", &report.h_av),
            ("h_avr", &report.h_avr),
            ("h_avf", &report.h_avf),
            ("h_hig", &report.h_hig),
            ("h_higr", &report.h_higr),
            ("h_higf", &report.h_higf),
        ] {
            match cell.value {
                Some(h) if h > 0.0 && h < 1.0 => {}
                other => problems.push(format!("{name}={other:?}")),
            }
        }
        for (name, cell) in [
            ("h_bd", &report.h_bd),
            ("h_bdr", &report.h_bdr),
            ("h_bdf", &report.h_bdf),
        ] {
            match (cell.value, cell.r_squared) {
                (Some(_), Some(r2)) if r2 > 0.9 => {}
                _ => problems.push(format!(
                    "{name} r²={:?} {}",
                    cell.r_squared,
                    cell.error.as_deref().unwrap_or("")
                )),
            }
        }
        ok &= problems.is_empty();
        parts.push(if problems.is_empty() {
            format!(
                "{ticker}: λ={:.3} H_AV={:.3} H_BD={:.3}",
                report.lambda.value.unwrap(),
                report.h_av.value.unwrap(),
                report.h_bd.value.unwrap()
            )
        } else {
            format!("{ticker}: {}", problems.join(", "))
        });
    }
    Verdict::check(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("MSD memory law", msd_memory_law),
        ("FLSM Hurst law", hurst_law),
        ("shuffle destroys memory", shuffle_destroys_memory),
        ("Sparre Andersen burst exponent", sparre_andersen),
        ("reversion round trip", reversion_round_trip),
        ("identity and exact cases", exact_cases),
        ("tail-fit oracle", tail_oracle),
        ("burst partition exactness", burst_partition),
        ("parser fixtures", parser_fixtures),
        ("LOBSTER sample end to end", lobster_sample),
    ];
    let results: Vec<(Verdict, f64)> = criteria
        .par_iter()
        .map(|(_, f)| {
            let t = Instant::now();
            let v = f();
            (v, t.elapsed().as_secs_f64())
        })
        .collect();

    let mut failed = 0;
    for (i, ((name, _), (verdict, secs))) in criteria.iter().zip(&results).enumerate() {
        let status = match verdict.pass {
            Some(true) => "PASS",
            Some(false) => {
                failed += 1;
                "FAIL"
            }
            None => "SKIP",
        };
        println!(
            "criterion {:>2} {status} [{name}, {secs:.1}s] {}",
            i + 1,
            verdict.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed, {} skipped",
        results.iter().filter(|r| r.0.pass == Some(true)).count(),
        results.iter().filter(|r| r.0.pass.is_none()).count()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
