use log::warn;
use serde::{Deserialize, Serialize};

use super::fit::{loglog_fit, ExponentFit};
use super::hist::{log_histogram, LogHistogram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Positive,
    Negative,
    Absolute,
}

impl TailSide {
    /// Magnitudes on the selected side; zeros never enter a tail.
    pub fn select(self, y: &[f64]) -> Vec<f64> {
        match self {
            TailSide::Positive => y.iter().copied().filter(|&v| v > 0.0).collect(),
            TailSide::Negative => y.iter().filter(|&&v| v < 0.0).map(|v| -v).collect(),
            TailSide::Absolute => y.iter().filter(|&&v| v != 0.0).map(|v| v.abs()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    /// Fraction of the selected magnitudes (largest first) forming the tail.
    pub tail_fraction: f64,
    pub bins_per_decade: usize,
    /// Fitting stops at the first bin holding fewer samples than this.
    pub min_bin_count: u64,
    /// Smallest tail sample count accepted.
    pub min_tail_samples: usize,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig {
            tail_fraction: 0.01,
            bins_per_decade: 10,
            min_bin_count: 10,
            min_tail_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub side: TailSide,
    /// PDF tail exponent ν from the log-binned fit (P(x) ~ x^{−ν}).
    pub fit: ExponentFit,
    pub nu: f64,
    /// α = ν − 1.
    pub alpha: f64,
    pub inv_alpha: f64,
    /// Hill estimate of ν on the same tail, as a cross-check.
    pub hill_nu: f64,
    pub tail_threshold: f64,
    pub tail_samples: usize,
    /// ν ≤ 1: the fitted law cannot be normalized.
    pub non_normalizable: bool,
    pub histogram: LogHistogram,
}

/// Hill estimate of the PDF exponent ν = 1 + k / Σ ln(x_i / x_min) over the
/// sorted tail (x_min = smallest tail value).
pub fn hill_nu(tail_sorted: &[f64]) -> Option<f64> {
    let x_min = *tail_sorted.first()?;
    let s: f64 = tail_sorted[1..].iter().map(|x| (x / x_min).ln()).sum();
    if s > 0.0 {
        Some(1.0 + (tail_sorted.len() - 1) as f64 / s)
    } else {
        None
    }
}

/// Power-law fit of the PDF tail of `y` on one side.
pub fn tail_fit(y: &[f64], side: TailSide, cfg: &TailConfig) -> Result<TailFit> {
    if !(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0) {
        return Err(Error::param(format!(
            "tail_fraction must be in (0, 1], got {}",
            cfg.tail_fraction
        )));
    }
    let mut mags = side.select(y);
    let k = (mags.len() as f64 * cfg.tail_fraction).ceil() as usize;
    if k < cfg.min_tail_samples.max(3) {
        return Err(Error::InsufficientData(format!(
            "{k} samples in the {side:?} tail, need {}",
            cfg.min_tail_samples
        )));
    }
    mags.sort_by(f64::total_cmp);
    let tail = &mags[mags.len() - k..];
    let histogram = log_histogram(tail, cfg.bins_per_decade)?;

    let cut = histogram
        .counts
        .iter()
        .position(|&c| c < cfg.min_bin_count)
        .unwrap_or(histogram.n_bins());
    if cut < 3 {
        return Err(Error::InsufficientData(format!(
            "only {cut} populated tail bins before the first sparse bin"
        )));
    }
    let fit = loglog_fit(
        &histogram.centers[..cut],
        &histogram.densities[..cut],
        |s| -s,
    )?;
    let nu = fit.exponent;
    let non_normalizable = nu <= 1.0;
    if non_normalizable {
        warn!("tail_fit: non-normalizable fit, nu = {nu}");
    }
    let alpha = nu - 1.0;
    Ok(TailFit {
        side,
        fit,
        nu,
        alpha,
        inv_alpha: 1.0 / alpha,
        hill_nu: hill_nu(tail).unwrap_or(f64::NAN),
        tail_threshold: tail[0],
        tail_samples: k,
        non_normalizable,
        histogram,
    })
}
