//! Python bindings: series, transforms, generators, estimators and the
//! per-stock pipeline.

use std::path::PathBuf;

use flsm_core::burst::{self, DurationKind};
use flsm_core::estimators::{self, TailSide};
use flsm_core::pipeline::{self, RunConfig};
use flsm_core::synth::{self, GenSpec, Noise};
use flsm_core::{transform, Error, Series, SeriesKind, SeriesMeta};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<SeriesKind> {
    serde_json::from_value(serde_json::Value::String(kind.to_lowercase()))
        .map_err(|_| PyValueError::new_err(format!("unknown series kind {kind:?}")))
}

#[pyclass(name = "Series", module = "flsm", skip_from_py_object)]
#[derive(Clone)]
pub struct PySeries {
    inner: Series,
}

#[pymethods]
impl PySeries {
    #[new]
    #[pyo3(signature = (values, kind = "increments", ticker = "", date = None))]
    fn new(values: Vec<f64>, kind: &str, ticker: &str, date: Option<String>) -> PyResult<Self> {
        let mut meta = SeriesMeta::new(ticker, "python");
        if let Some(d) = date {
            meta = meta.with_date(d);
        }
        Ok(PySeries {
            inner: Series::new(values, parse_kind(kind)?, meta),
        })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn ticker(&self) -> String {
        self.inner.meta.ticker.clone()
    }

    #[getter]
    fn provenance(&self) -> Vec<String> {
        self.inner.meta.provenance.clone()
    }

    fn file_stem(&self) -> String {
        self.inner.file_stem()
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_csv(&path).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, fallback_kind = "increments"))]
    fn read_csv(path: PathBuf, fallback_kind: &str) -> PyResult<Self> {
        let inner = Series::read_csv(&path, parse_kind(fallback_kind)?).map_err(py_err)?;
        Ok(PySeries { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Series(kind={}, ticker={:?}, len={})",
            self.inner.kind,
            self.inner.meta.ticker,
            self.inner.len()
        )
    }
}

fn wrap(inner: Series) -> PySeries {
    PySeries { inner }
}

#[pyclass(name = "ExponentFit", module = "flsm", get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyExponentFit {
    exponent: f64,
    intercept: f64,
    fit_range: (f64, f64),
    r_squared: f64,
    std_error: f64,
    n_points: usize,
}

#[pymethods]
impl PyExponentFit {
    fn __repr__(&self) -> String {
        format!(
            "ExponentFit(exponent={:.4}, r_squared={:.4}, std_error={:.4}, n_points={})",
            self.exponent, self.r_squared, self.std_error, self.n_points
        )
    }
}

impl From<estimators::ExponentFit> for PyExponentFit {
    fn from(f: estimators::ExponentFit) -> Self {
        PyExponentFit {
            exponent: f.exponent,
            intercept: f.intercept,
            fit_range: f.fit_range,
            r_squared: f.r_squared,
            std_error: f.std_error,
            n_points: f.n_points,
        }
    }
}

#[pyclass(name = "TailFit", module = "flsm", get_all)]
pub struct PyTailFit {
    nu: f64,
    alpha: f64,
    inv_alpha: f64,
    hill_nu: f64,
    tail_threshold: f64,
    tail_samples: usize,
    fit: PyExponentFit,
}

#[pyclass(name = "BurstFit", module = "flsm", get_all)]
pub struct PyBurstFit {
    eta: f64,
    h_bd: f64,
    n_durations: usize,
    fit: PyExponentFit,
}

fn noise(law: &str, sigma: f64, alpha: f64, nu: f64) -> PyResult<Noise> {
    Ok(match law {
        "gaussian" => Noise::Gaussian { sigma },
        "stable" => Noise::Stable {
            alpha,
            scale: sigma,
        },
        "pareto" | "pareto_symmetric" => Noise::ParetoSymmetric { nu, x_min: sigma },
        other => return Err(PyValueError::new_err(format!("unknown law {other:?}"))),
    })
}

/// Accumulated ARFIMA(0,d,0) path driven by the chosen noise law.
#[pyfunction]
#[pyo3(signature = (law, d, length, seed, sigma = 1.0, alpha = 2.0, nu = 3.0, truncation = None))]
#[allow(clippy::too_many_arguments)]
fn gen_arfima(
    law: &str,
    d: f64,
    length: usize,
    seed: u64,
    sigma: f64,
    alpha: f64,
    nu: f64,
    truncation: Option<usize>,
) -> PyResult<PySeries> {
    let spec = GenSpec {
        truncation,
        ..GenSpec::new(noise(law, sigma, alpha, nu)?, d, length, seed)
    };
    synth::gen_arfima(&spec).map(wrap).map_err(py_err)
}

/// Fractionally summed increments (before accumulation).
#[pyfunction]
#[pyo3(signature = (law, d, length, seed, sigma = 1.0, alpha = 2.0, nu = 3.0, truncation = None))]
#[allow(clippy::too_many_arguments)]
fn gen_arfima_increments(
    law: &str,
    d: f64,
    length: usize,
    seed: u64,
    sigma: f64,
    alpha: f64,
    nu: f64,
    truncation: Option<usize>,
) -> PyResult<PySeries> {
    let spec = GenSpec {
        truncation,
        ..GenSpec::new(noise(law, sigma, alpha, nu)?, d, length, seed)
    };
    synth::gen_arfima_increments(&spec)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
fn increments(series: PyRef<'_, PySeries>) -> PyResult<PySeries> {
    flsm_core::lob::increments(&series.inner)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
fn shuffle_increments(series: PyRef<'_, PySeries>, seed: u64) -> PyResult<PySeries> {
    transform::shuffle_increments(&series.inner, seed)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (series, start = 0.0))]
fn accumulate(series: PyRef<'_, PySeries>, start: f64) -> PyResult<PySeries> {
    transform::accumulate(&series.inner, start)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (series, bound = transform::DEFAULT_BOUND, start = 0.0))]
fn bound_series(series: PyRef<'_, PySeries>, bound: f64, start: f64) -> PyResult<PySeries> {
    transform::bound_series(&series.inner, bound, start)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (series, d, n_terms = transform::DEFAULT_TRUNCATION))]
fn fractional_revert(series: PyRef<'_, PySeries>, d: f64, n_terms: usize) -> PyResult<PySeries> {
    transform::fractional_revert(&series.inner, d, n_terms)
        .map(wrap)
        .map_err(py_err)
}

#[pyfunction]
fn fractional_weights(d: f64, n_terms: usize) -> PyResult<Vec<f64>> {
    transform::fractional_weights(d, n_terms).map_err(py_err)
}

/// MSD exponent λ of a path over log-spaced lags.
#[pyfunction]
#[pyo3(signature = (x, lag_min = 10, lag_max = None, lag_count = 20))]
fn msd_exponent(
    x: Vec<f64>,
    lag_min: usize,
    lag_max: Option<usize>,
    lag_count: usize,
) -> PyResult<PyExponentFit> {
    let lags = estimators::msd_lags(x.len(), lag_min, lag_max, lag_count);
    let msd = estimators::sample_msd(&x, &lags).map_err(py_err)?;
    let fit = estimators::fit_msd_exponent(&msd, None).map_err(py_err)?;
    Ok(fit.fit.into())
}

/// Absolute-value Hurst estimate from increments.
#[pyfunction]
#[pyo3(signature = (y, max_scale = None))]
fn ave_hurst(y: Vec<f64>, max_scale: Option<usize>) -> PyResult<PyExponentFit> {
    let grid = estimators::ave_block_grid(y.len(), max_scale);
    estimators::ave_hurst(&y, &grid)
        .map(Into::into)
        .map_err(py_err)
}

/// Higuchi Hurst estimate from a path.
#[pyfunction]
#[pyo3(signature = (x, max_scale = None))]
fn higuchi_hurst(x: Vec<f64>, max_scale: Option<usize>) -> PyResult<PyExponentFit> {
    let grid = estimators::higuchi_window_grid(x.len(), max_scale);
    estimators::higuchi_hurst(&x, &grid)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (y, side = "absolute", tail_fraction = 0.01))]
fn tail_fit(y: Vec<f64>, side: &str, tail_fraction: f64) -> PyResult<PyTailFit> {
    let side = match side {
        "absolute" => TailSide::Absolute,
        "positive" => TailSide::Positive,
        "negative" => TailSide::Negative,
        other => return Err(PyValueError::new_err(format!("unknown side {other:?}"))),
    };
    let cfg = estimators::TailConfig {
        tail_fraction,
        ..Default::default()
    };
    let f = estimators::tail_fit(&y, side, &cfg).map_err(py_err)?;
    Ok(PyTailFit {
        nu: f.nu,
        alpha: f.alpha,
        inv_alpha: f.inv_alpha,
        hill_nu: f.hill_nu,
        tail_threshold: f.tail_threshold,
        tail_samples: f.tail_samples,
        fit: f.fit.into(),
    })
}

/// Burst and inter-burst durations of `x` around `threshold`, as a dict.
#[pyfunction]
#[pyo3(signature = (x, threshold = 0.0))]
fn burst_durations(py: Python<'_>, x: Vec<f64>, threshold: f64) -> PyResult<Py<PyAny>> {
    let s = burst::durations(&x, threshold).map_err(py_err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("threshold", s.threshold)?;
    d.set_item("bursts", s.bursts)?;
    d.set_item("interbursts", s.interbursts)?;
    d.set_item("discarded_edges", s.discarded_edges)?;
    d.set_item("edge_ticks", s.edge_ticks)?;
    Ok(d.into_any().unbind())
}

#[pyfunction]
#[pyo3(signature = (x, threshold = 0.0, which = "burst", fit_range = burst::DEFAULT_FIT_RANGE))]
fn burst_fit(
    x: Vec<f64>,
    threshold: f64,
    which: &str,
    fit_range: (u64, u64),
) -> PyResult<PyBurstFit> {
    let which = match which {
        "burst" => DurationKind::Burst,
        "interburst" => DurationKind::InterBurst,
        "both" => DurationKind::Both,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown duration kind {other:?}"
            )))
        }
    };
    let cfg = burst::BurstFitConfig {
        fit_range,
        ..Default::default()
    };
    let sample = burst::durations(&x, threshold).map_err(py_err)?;
    let f = burst::fit_burst_pdf(&sample, which, &cfg).map_err(py_err)?;
    Ok(PyBurstFit {
        eta: f.eta,
        h_bd: f.h_bd,
        n_durations: f.n_durations,
        fit: f.fit.into(),
    })
}

/// Disbalance series of one LOBSTER orderbook file.
#[pyfunction]
#[pyo3(signature = (path, depth = flsm_core::lob::DEFAULT_DEPTH, ticker = ""))]
fn disbalance_from_orderbook(path: PathBuf, depth: usize, ticker: &str) -> PyResult<PySeries> {
    let book = flsm_core::lob::parse_orderbook(&path, depth).map_err(py_err)?;
    flsm_core::lob::build_disbalance(&book, SeriesMeta::new(ticker, path.display().to_string()))
        .map(wrap)
        .map_err(py_err)
}

/// Runs the full per-stock graph for `ticker` under a JSON config and returns
/// the report as a JSON string.
#[pyfunction]
fn run_stock(config_json: &str, ticker: &str) -> PyResult<String> {
    let cfg: RunConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    cfg.validate().map_err(py_err)?;
    let analysis = pipeline::run_stock(&cfg, ticker).map_err(py_err)?;
    serde_json::to_string(&analysis.report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn flsm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_class::<PyExponentFit>()?;
    m.add_class::<PyTailFit>()?;
    m.add_class::<PyBurstFit>()?;
    m.add_function(wrap_pyfunction!(gen_arfima, m)?)?;
    m.add_function(wrap_pyfunction!(gen_arfima_increments, m)?)?;
    m.add_function(wrap_pyfunction!(increments, m)?)?;
    m.add_function(wrap_pyfunction!(shuffle_increments, m)?)?;
    m.add_function(wrap_pyfunction!(accumulate, m)?)?;
    m.add_function(wrap_pyfunction!(bound_series, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_revert, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_weights, m)?)?;
    m.add_function(wrap_pyfunction!(msd_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(ave_hurst, m)?)?;
    m.add_function(wrap_pyfunction!(higuchi_hurst, m)?)?;
    m.add_function(wrap_pyfunction!(tail_fit, m)?)?;
    m.add_function(wrap_pyfunction!(burst_durations, m)?)?;
    m.add_function(wrap_pyfunction!(burst_fit, m)?)?;
    m.add_function(wrap_pyfunction!(disbalance_from_orderbook, m)?)?;
    m.add_function(wrap_pyfunction!(run_stock, m)?)?;
    Ok(())
}
