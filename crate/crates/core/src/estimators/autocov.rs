use crate::error::{Error, Result};

/// Lag-k autocovariance ρ(k) = 1/(N−k) Σ_{i<N−k} Y_i Y_{i+k}. Uncentered by
/// default; `centered` subtracts the overall mean first.
pub fn autocovariance(y: &[f64], lags: &[usize], centered: bool) -> Result<Vec<(usize, f64)>> {
    let n = y.len();
    let mean = if centered && n > 0 {
        y.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    lags.iter()
        .map(|&k| {
            if k >= n {
                return Err(Error::param(format!("lag {k} >= series length {n}")));
            }
            let s: f64 = y[..n - k]
                .iter()
                .zip(&y[k..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum();
            Ok((k, s / (n - k) as f64))
        })
        .collect()
}
