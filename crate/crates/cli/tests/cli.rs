use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"{
  "synthetic": [
    {"ticker": "SYA", "days": 2,
     "spec": {"noise": {"law": "pareto_symmetric", "nu": 3.0, "x_min": 1.0}, "d": -0.3, "length": 40000, "seed": 1}},
    {"ticker": "SYB", "days": 2,
     "spec": {"noise": {"law": "gaussian", "sigma": 1.0}, "d": -0.2, "length": 40000, "seed": 2}}
  ],
  "estimators": {"max_scale": 1000}
}"#;

fn flsm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flsm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), CONFIG).unwrap();
    dir
}

fn manifest(path: &Path) -> Vec<serde_json::Value> {
    let text = fs::read_to_string(path.join("errors.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&text)
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn clean_stage_exits_zero_with_empty_manifest() {
    let dir = setup();
    let out = flsm(
        dir.path(),
        &["--config", "cfg.json", "--out", "o", "ingest"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(manifest(&dir.path().join("o")).is_empty());
    assert!(dir.path().join("o/days/SYA_day001_disbalance.csv").exists());
    assert!(dir
        .path()
        .join("o/days/SYB_day002_disbalance.csv.json")
        .exists());
}

#[test]
fn missing_data_exits_nonzero_with_manifest() {
    let dir = setup();
    fs::create_dir(dir.path().join("data")).unwrap();
    let out = flsm(dir.path(), &["--tickers", "AAPL", "--out", "o", "run-all"]);
    assert_eq!(out.status.code(), Some(1));
    let errors = manifest(&dir.path().join("o"));
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["ticker"], "AAPL");
    assert!(errors[0]["message"]
        .as_str()
        .unwrap()
        .contains("no depth-10 LOBSTER files"));
    let table = fs::read_to_string(dir.path().join("o/table1.csv")).unwrap();
    assert_eq!(
        table.lines().count(),
        1,
        "no partial row for a failed stock"
    );
}

#[test]
fn bad_config_is_reported() {
    let dir = setup();
    fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let out = flsm(
        dir.path(),
        &["--config", "bad.json", "--out", "o", "report"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(manifest(&dir.path().join("o")).len(), 1);

    let out = flsm(dir.path(), &["--out", "o", "--stage", "ingest", "report"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn staged_and_single_pass_runs_agree() {
    let dir = setup();
    let one = flsm(
        dir.path(),
        &[
            "--config", "cfg.json", "--out", "a", "--seed", "5", "run-all",
        ],
    );
    // Small synthetic stocks leave some cells without enough data.
    assert_eq!(
        one.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert!(!manifest(&dir.path().join("a")).is_empty());

    let staged = flsm(
        dir.path(),
        &[
            "--config", "cfg.json", "--out", "b", "--seed", "5", "run-all", "--stage", "estimate",
        ],
    );
    assert_eq!(staged.status.code(), Some(2));
    assert!(!dir.path().join("b/table1.csv").exists());
    let rep = flsm(
        dir.path(),
        &[
            "--config", "cfg.json", "--out", "b", "--seed", "5", "report",
        ],
    );
    assert_eq!(rep.status.code(), Some(2));

    for f in ["table1.csv", "table2.csv", "summary.csv", "errors.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let header = fs::read_to_string(dir.path().join("a/table1.csv")).unwrap();
    assert!(header.starts_with("stock,lambda,h_av,h_avr,h_hig,h_higr,h_bd,h_bdr,inv_alpha\nSYA,"));
    let hist = fs::read_to_string(
        dir.path()
            .join("a/histograms/SYA_day001_day002_burst_x.csv"),
    )
    .unwrap();
    assert!(hist.starts_with("bin_center,density,count\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (d1, d2) = (setup(), setup());
    for d in [&d1, &d2] {
        flsm(
            d.path(),
            &[
                "--config", "cfg.json", "--out", "o", "--jobs", "2", "run-all",
            ],
        );
    }
    for f in ["report.json", "SYA_day001_day002_report.json", "table2.csv"] {
        assert_eq!(
            fs::read(d1.path().join("o").join(f)).unwrap(),
            fs::read(d2.path().join("o").join(f)).unwrap(),
            "{f}"
        );
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(d1.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["transform"]["seed"], 0);
    assert_eq!(
        report["reports"][0]["shuffle_seeds"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn generate_then_fit_a_single_series() {
    let dir = setup();
    let out = flsm(
        dir.path(),
        &[
            "--out", "o", "generate", "--law", "stable", "--alpha", "1.5", "--d", "-0.3",
            "--length", "20000", "--name", "st",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let series = "o/generated/st_nodate_synthetic.csv";
    assert!(dir.path().join(series).exists());

    let out = flsm(dir.path(), &["--out", "o", "estimate", "--input", series]);
    // 20000 samples give a 200-sample tail, below the default minimum.
    assert_eq!(out.status.code(), Some(2));
    let fits: serde_json::Value = serde_json::from_slice(
        &fs::read(dir.path().join("o/st_nodate_synthetic_fits.json")).unwrap(),
    )
    .unwrap();
    let h = fits["ave"]["exponent"].as_f64().unwrap();
    assert!(h > 0.0 && h < 1.0, "{h}");
    assert!(fits["msd"]["fit"]["exponent"].is_number());
    assert!(fits["tail"]["error"].is_string());

    let out = flsm(
        dir.path(),
        &[
            "--out",
            "o",
            "burst",
            "--input",
            series,
            "--thresholds",
            "0.5",
        ],
    );
    assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
    let burst: serde_json::Value = serde_json::from_slice(
        &fs::read(dir.path().join("o/st_nodate_synthetic_burst.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(burst["sweeps"].as_array().unwrap().len(), 1);
}
