use super::fit::{loglog_fit, ExponentFit};
use crate::error::{Error, Result};

/// Absolute Value Estimator of the Hurst exponent.
///
/// For each block size n the series is cut into m = ⌊N/n⌋ blocks (the
/// remainder is dropped) and δ_n = mean_j |block_mean_j − ⟨Y⟩| is computed
/// with ⟨Y⟩ the overall mean. δ_n ~ n^{H−1}, so H = 1 + slope.
pub fn ave_hurst(y: &[f64], block_sizes: &[usize]) -> Result<ExponentFit> {
    let n = y.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut sizes = Vec::with_capacity(block_sizes.len());
    let mut deltas = Vec::with_capacity(block_sizes.len());
    for &size in block_sizes {
        if size == 0 {
            return Err(Error::param("block size must be >= 1"));
        }
        let m = n / size;
        if m < 8 {
            return Err(Error::param(format!(
                "block size {size} leaves {m} blocks (< 8) for N = {n}"
            )));
        }
        let delta = y[..m * size]
            .chunks_exact(size)
            .map(|b| (b.iter().sum::<f64>() / size as f64 - mean).abs())
            .sum::<f64>()
            / m as f64;
        if !(delta > 0.0) {
            return Err(Error::DegenerateSeries(format!(
                "delta_n = 0 at block size {size}"
            )));
        }
        sizes.push(size as f64);
        deltas.push(delta);
    }
    loglog_fit(&sizes, &deltas, |s| 1.0 + s)
}
