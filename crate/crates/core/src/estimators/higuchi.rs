use super::fit::{loglog_fit, ExponentFit};
use crate::error::{Error, Result};

/// Normalized Higuchi path length
/// L_n = (N−1)/n³ · Σ_{i=1}^{n} 1/(m−1) Σ_{j=1}^{m−1} |X_{i+jn} − X_{i+(j−1)n}|
/// with m = ⌊(N−1)/n⌋.
pub fn higuchi_length(x: &[f64], stride: usize) -> Result<f64> {
    let n_total = x.len();
    if stride == 0 {
        return Err(Error::param("Higuchi stride must be >= 1"));
    }
    let m = n_total.saturating_sub(1) / stride;
    if m < 4 {
        return Err(Error::param(format!(
            "stride {stride} leaves m = {m} (< 4) for N = {n_total}"
        )));
    }
    let mut total = 0.0;
    for i in 1..=stride {
        let mut s = 0.0;
        for j in 1..m {
            s += (x[i + j * stride] - x[i + (j - 1) * stride]).abs();
        }
        total += s / (m - 1) as f64;
    }
    let nf = stride as f64;
    Ok((n_total - 1) as f64 / (nf * nf * nf) * total)
}

/// Higuchi estimate of H from L_n ~ n^{−D}, D = 2 − H. Expects a path
/// (accumulated series), not increments.
pub fn higuchi_hurst(x: &[f64], window_sizes: &[usize]) -> Result<ExponentFit> {
    let mut ns = Vec::with_capacity(window_sizes.len());
    let mut ls = Vec::with_capacity(window_sizes.len());
    for &k in window_sizes {
        let l = higuchi_length(x, k)?;
        if !(l > 0.0) {
            return Err(Error::DegenerateSeries(format!(
                "zero path length at stride {k}"
            )));
        }
        ns.push(k as f64);
        ls.push(l);
    }
    // slope = −D, H = 2 − D = 2 + slope
    loglog_fit(&ns, &ls, |s| 2.0 + s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_length_closed_form() {
        let n = 1001;
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        for k in [1, 3, 10, 50, 250] {
            let l = higuchi_length(&x, k).unwrap();
            let expected = (n - 1) as f64 / k as f64;
            assert!(
                (l - expected).abs() < 1e-9 * expected,
                "k={k}: {l} vs {expected}"
            );
        }
        let f = higuchi_hurst(&x, &[1, 2, 4, 8, 16, 32]).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_path_rejected() {
        assert!(matches!(
            higuchi_hurst(&[1.0; 100], &[1, 2, 4]),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn stride_bounds() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert!(higuchi_length(&x, 4).is_ok());
        assert!(higuchi_length(&x, 5).is_err());
        assert!(higuchi_length(&x, 0).is_err());
    }
}
