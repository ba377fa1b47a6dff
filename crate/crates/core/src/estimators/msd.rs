use log::warn;
use serde::{Deserialize, Serialize};

use super::fit::{loglog_fit, ExponentFit};
use super::grid::log_spaced_lags;
use crate::error::{Error, Result};

/// Time-averaged mean squared displacement
/// M(k) = 1/(N−k) Σ_i (X_{i+k} − X_i)².
pub fn sample_msd(x: &[f64], lags: &[usize]) -> Result<Vec<(usize, f64)>> {
    let n = x.len();
    lags.iter()
        .map(|&k| {
            if k == 0 {
                return Err(Error::param("MSD lags must be >= 1"));
            }
            if k >= n {
                return Err(Error::param(format!("lag {k} >= series length {n}")));
            }
            let sum: f64 = x[k..].iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
            Ok((k, sum / (n - k) as f64))
        })
        .collect()
}

/// Default MSD lags: 20 log-spaced lags in `[10, N/100]`, falling back to
/// `[1, N/4]` for short series.
pub fn default_msd_lags(n: usize) -> Vec<usize> {
    msd_lags(n, 10, None, 20)
}

pub fn msd_lags(n: usize, k_min: usize, k_max: Option<usize>, count: usize) -> Vec<usize> {
    let hi = k_max.unwrap_or(n / 100).min(n.saturating_sub(1));
    let lags = log_spaced_lags(k_min.max(1), hi, count);
    if lags.len() >= 3 {
        lags
    } else {
        log_spaced_lags(1, (n / 4).max(1), count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsdFit {
    /// Exponent λ of M(k) ~ k^λ.
    pub fit: ExponentFit,
    /// Memory parameter d = (λ − 1) / 2.
    pub d: f64,
}

/// Least-squares λ on log M vs log k, optionally restricted to `range`
/// (inclusive). Zero-MSD points are dropped with a warning.
pub fn fit_msd_exponent(msd: &[(usize, f64)], range: Option<(usize, usize)>) -> Result<MsdFit> {
    let mut ks = Vec::new();
    let mut ms = Vec::new();
    let mut dropped = 0usize;
    for &(k, m) in msd {
        if let Some((lo, hi)) = range {
            if k < lo || k > hi {
                continue;
            }
        }
        if m > 0.0 {
            ks.push(k as f64);
            ms.push(m);
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        warn!("fit_msd_exponent: excluded {dropped} zero-MSD points");
    }
    if ks.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "MSD fit needs 3 positive points, got {}",
            ks.len()
        )));
    }
    let fit = loglog_fit(&ks, &ms, |s| s)?;
    Ok(MsdFit {
        fit,
        d: (fit.exponent - 1.0) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_zero() {
        let m = sample_msd(&[3.0; 50], &[1, 5, 49]).unwrap();
        assert!(m.iter().all(|&(_, v)| v == 0.0));
        assert!(fit_msd_exponent(&m, None).is_err());
    }

    #[test]
    fn ramp_is_k_squared() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let m = sample_msd(&x, &[1, 2, 7, 100, 999]).unwrap();
        for (k, v) in &m {
            assert_eq!(*v, (*k * *k) as f64);
        }
        let f = fit_msd_exponent(&m, None).unwrap();
        assert!((f.fit.exponent - 2.0).abs() < 1e-9);
        assert!((f.d - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lag_bounds() {
        assert!(sample_msd(&[1.0, 2.0], &[2]).is_err());
        assert!(sample_msd(&[1.0, 2.0], &[0]).is_err());
    }

    #[test]
    fn range_filter() {
        let pts: Vec<(usize, f64)> = (1..=10).map(|k| (k, (k * k) as f64)).collect();
        let f = fit_msd_exponent(&pts, Some((3, 6))).unwrap();
        assert_eq!(f.fit.n_points, 4);
        assert_eq!(f.fit.fit_range, (3.0, 6.0));
        assert!(fit_msd_exponent(&pts, Some((3, 4))).is_err());
    }

    #[test]
    fn default_lags() {
        let l = default_msd_lags(1 << 17);
        assert_eq!(l[0], 10);
        assert_eq!(*l.last().unwrap(), (1 << 17) / 100);
        assert!(default_msd_lags(200).len() >= 3);
    }
}
