use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One estimate in a report; failures are recorded instead of aborting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl Cell {
    pub fn ok(value: f64, std_error: f64) -> Cell {
        Cell {
            value: Some(value),
            std_error: Some(std_error),
            ..Default::default()
        }
    }

    pub fn failed(msg: impl Into<String>) -> Cell {
        Cell {
            error: Some(msg.into()),
            ..Default::default()
        }
    }

    pub fn with_r_squared(mut self, r2: f64) -> Cell {
        self.r_squared = Some(r2);
        self
    }

    pub fn from_result(r: Result<(f64, f64, f64)>) -> Cell {
        match r {
            Ok((v, se, r2)) => Cell::ok(v, se).with_r_squared(r2),
            Err(e) => Cell::failed(e.to_string()),
        }
    }

    /// a − b with independent standard errors.
    pub fn difference(a: &Cell, b: &Cell) -> Cell {
        match (a.value, b.value) {
            (Some(x), Some(y)) => Cell {
                value: Some(x - y),
                std_error: match (a.std_error, b.std_error) {
                    (Some(s), Some(t)) => Some(s.hypot(t)),
                    _ => None,
                },
                ..Default::default()
            },
            _ => Cell::failed("input cell missing"),
        }
    }

    /// f(value), with the standard error propagated through |f'|.
    pub fn map(a: &Cell, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Cell {
        match a.value {
            Some(x) => Cell {
                value: Some(f(x)),
                std_error: a.std_error.map(|s| s * df(x).abs()),
                ..Default::default()
            },
            None => Cell::failed("input cell missing"),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// "empirical" or "bounded".
    pub series: String,
    pub multiplier: f64,
    pub threshold: f64,
    pub n_interbursts: usize,
    /// Inter-burst duration exponent η at this threshold.
    pub eta: Cell,
}

/// Every exponent estimated for one stock.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StockReport {
    pub ticker: String,
    pub dates: Vec<String>,
    /// Shuffle seed used for each day, in `dates` order.
    pub shuffle_seeds: Vec<u64>,
    pub n_increments: usize,

    /// MSD exponent of the empirical, randomized and reverted paths.
    pub lambda: Cell,
    pub lambda_r: Cell,
    pub lambda_f: Cell,
    pub h_av: Cell,
    pub h_avr: Cell,
    pub h_avf: Cell,
    pub h_hig: Cell,
    pub h_higr: Cell,
    pub h_higf: Cell,
    /// Zero-threshold burst-duration estimates (empirical, bounded random, reverted).
    pub h_bd: Cell,
    pub h_bdr: Cell,
    pub h_bdf: Cell,
    /// Increment PDF tail exponents.
    pub nu: Cell,
    pub nu_pos: Cell,
    pub nu_neg: Cell,
    pub nu_f: Cell,
    pub nu_hill: Cell,
    pub inv_alpha: Cell,
    /// Codifference decay exponent α − αH (from ν and H_AV).
    pub gamma_codiff: Cell,

    pub d_msd: Cell,
    pub d_msdf: Cell,
    pub d_av: Cell,
    pub d_avf: Cell,
    pub d_hig: Cell,
    pub d_higf: Cell,
    pub d_bd: Cell,
    pub d_bdf: Cell,

    pub sweeps: Vec<SweepCell>,
}

impl StockReport {
    /// Fills the derived memory parameters and 1/α from the primary cells.
    pub fn derive(&mut self) {
        let half_minus = |l: f64| (l - 1.0) / 2.0;
        self.d_msd = Cell::map(&self.lambda, half_minus, |_| 0.5);
        self.d_msdf = Cell::map(&self.lambda_f, half_minus, |_| 0.5);
        self.d_av = Cell::difference(&self.h_av, &self.h_avr);
        self.d_avf = Cell::difference(&self.h_avf, &self.h_avr);
        self.d_hig = Cell::difference(&self.h_hig, &self.h_higr);
        self.d_higf = Cell::difference(&self.h_higf, &self.h_higr);
        self.d_bd = Cell::difference(&self.h_bd, &self.h_bdr);
        self.d_bdf = Cell::difference(&self.h_bdf, &self.h_bdr);
        self.inv_alpha = Cell::map(
            &self.nu,
            |nu| 1.0 / (nu - 1.0),
            |nu| 1.0 / (nu - 1.0).powi(2),
        );
        self.gamma_codiff = match (self.nu.value, self.h_av.value) {
            (Some(nu), Some(h)) => Cell {
                value: Some((nu - 1.0) * (1.0 - h)),
                ..Default::default()
            },
            _ => Cell::failed("input cell missing"),
        };
    }

    /// (name, cell) for every scalar cell, in declaration order.
    pub fn cells(&self) -> Vec<(&'static str, &Cell)> {
        vec![
            ("lambda", &self.lambda),
            ("lambda_r", &self.lambda_r),
            ("lambda_f", &self.lambda_f),
            ("h_av", &self.h_av),
            ("h_avr", &self.h_avr),
            ("h_avf", &self.h_avf),
            ("h_hig", &self.h_hig),
            ("h_higr", &self.h_higr),
            ("h_higf", &self.h_higf),
            ("h_bd", &self.h_bd),
            ("h_bdr", &self.h_bdr),
            ("h_bdf", &self.h_bdf),
            ("nu", &self.nu),
            ("nu_pos", &self.nu_pos),
            ("nu_neg", &self.nu_neg),
            ("nu_f", &self.nu_f),
            ("nu_hill", &self.nu_hill),
            ("inv_alpha", &self.inv_alpha),
            ("gamma_codiff", &self.gamma_codiff),
            ("d_msd", &self.d_msd),
            ("d_msdf", &self.d_msdf),
            ("d_av", &self.d_av),
            ("d_avf", &self.d_avf),
            ("d_hig", &self.d_hig),
            ("d_higf", &self.d_higf),
            ("d_bd", &self.d_bd),
            ("d_bdf", &self.d_bdf),
        ]
    }

    /// Primary cells that failed, with their error messages.
    pub fn failures(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .cells()
            .into_iter()
            .filter_map(|(name, c)| c.error.clone().map(|e| (name.to_string(), e)))
            .filter(|(_, e)| e != "input cell missing")
            .collect();
        for s in &self.sweeps {
            if let Some(e) = &s.eta.error {
                out.push((format!("sweep_{}_{}", s.series, s.multiplier), e.clone()));
            }
        }
        out
    }
}

pub const AGGREGATE_FIELDS: [&str; 8] = [
    "d_msd", "d_av", "d_hig", "d_bd", "d_msdf", "d_avf", "d_higf", "d_bdf",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub name: String,
    pub n: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (n − 1).
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_reports: usize,
    pub tickers: Vec<String>,
    pub fields: Vec<FieldSummary>,
}

impl Summary {
    pub fn field(&self, name: &str) -> Option<&FieldSummary> {
        self.fields.iter().find(|f| f.name == name)
    }
}

pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(var.sqrt()))
}

/// Cross-stock mean and standard deviation of every memory parameter.
pub fn aggregate(reports: &[StockReport]) -> Result<Summary> {
    if reports.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "aggregate needs at least 2 reports, got {}",
            reports.len()
        )));
    }
    let fields = AGGREGATE_FIELDS
        .iter()
        .map(|&name| {
            let values: Vec<f64> = reports
                .iter()
                .filter_map(|r| {
                    r.cells()
                        .into_iter()
                        .find(|(n, _)| *n == name)
                        .and_then(|(_, c)| c.value)
                })
                .collect();
            let (mean, sd) = mean_sd(&values);
            FieldSummary {
                name: name.to_string(),
                n: values.len(),
                mean,
                sd,
            }
        })
        .collect();
    Ok(Summary {
        n_reports: reports.len(),
        tickers: reports.iter().map(|r| r.ticker.clone()).collect(),
        fields,
    })
}
