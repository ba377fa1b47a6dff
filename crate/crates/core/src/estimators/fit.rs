use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of a straight-line fit on log-log axes.
///
/// `exponent` is the estimator's reported quantity (λ, H, ν, η …), which is
/// the raw slope mapped through the estimator's own relation; `intercept`,
/// `r_squared` and `std_error` describe the underlying regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub fit_range: (f64, f64),
    pub r_squared: f64,
    pub std_error: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_se: f64,
    pub n: usize,
}

/// Equal-weight ordinary least squares.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::param("ols: x and y lengths differ"));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 points for a fit, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all abscissae equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_se = (ss_res.max(0.0) / (nf - 2.0) / sxx).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        slope_se,
        n,
    })
}

/// Fits log(y) against log(x) and maps the slope to the reported exponent.
pub(crate) fn loglog_fit(
    x: &[f64],
    y: &[f64],
    to_exponent: impl Fn(f64) -> f64,
) -> Result<ExponentFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::param(
            "log-log fit needs strictly positive finite values",
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let line = ols(&lx, &ly)?;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        exponent: to_exponent(line.slope),
        intercept: line.intercept,
        fit_range: (lo, hi),
        r_squared: line.r_squared,
        std_error: line.slope_se,
        n_points: line.n,
    })
}
