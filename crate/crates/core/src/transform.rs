//! Series surgeries: increment shuffling, accumulation, soft bounding and
//! ARFIMA(0,d,0) fractional summation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

/// Name of the PRNG recorded in provenance strings.
pub const PRNG_NAME: &str = "ChaCha8";

pub const DEFAULT_BOUND: f64 = 100_000.0;
pub const DEFAULT_TRUNCATION: usize = 1000;

/// Whether increments are permuted across the whole joined series or only
/// within each trading day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShuffleScope {
    #[default]
    Joint,
    Day,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransformConfig {
    pub seed: u64,
    pub bound: f64,
    pub d: f64,
    pub truncation: usize,
    /// Drop the first `truncation` reverted samples before estimation.
    pub drop_warmup: bool,
    pub shuffle_scope: ShuffleScope,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            seed: 0,
            bound: DEFAULT_BOUND,
            d: -0.3,
            truncation: DEFAULT_TRUNCATION,
            drop_warmup: false,
            shuffle_scope: ShuffleScope::Joint,
        }
    }
}

impl TransformConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bound > 0.0) {
            return Err(Error::param(format!(
                "bound must be > 0, got {}",
                self.bound
            )));
        }
        check_memory(self.d)?;
        if self.truncation == 0 {
            return Err(Error::param("truncation must be at least 1"));
        }
        Ok(())
    }
}

pub(crate) fn check_memory(d: f64) -> Result<()> {
    if !(d.abs() < 0.5) {
        return Err(Error::param(format!(
            "memory parameter d must satisfy |d| < 0.5, got {d}"
        )));
    }
    Ok(())
}

fn require_steps(series: &Series, op: &'static str) -> Result<()> {
    if series.kind.is_path() {
        return Err(Error::KindMismatch {
            op,
            found: series.kind.to_string(),
        });
    }
    Ok(())
}

/// Uniform random permutation of the increments (Fisher–Yates, seeded).
pub fn shuffle_increments(increments: &Series, seed: u64) -> Result<Series> {
    require_steps(increments, "shuffle_increments")?;
    if increments.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut values = increments.values.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    values.shuffle(&mut rng);
    Ok(increments.derive(
        values,
        SeriesKind::Shuffled,
        format!("shuffle(prng={PRNG_NAME}, seed={seed})"),
    ))
}

/// Running sum offset by `start`.
pub fn accumulate_values(increments: &[f64], start: f64) -> Vec<f64> {
    increments
        .iter()
        .scan(start, |acc, &y| {
            *acc += y;
            Some(*acc)
        })
        .collect()
}

/// Path X(j) = start + Σ_{i≤j} Y(i). Plain increments accumulate to an
/// empirical path; shuffled, reverted and synthetic steps keep their kind.
pub fn accumulate(increments: &Series, start: f64) -> Result<Series> {
    require_steps(increments, "accumulate")?;
    let values = accumulate_values(&increments.values, start);
    let kind = match increments.kind {
        SeriesKind::Increments => SeriesKind::Empirical,
        other => other,
    };
    Ok(increments.derive(values, kind, format!("accumulate(start={start})")))
}

/// Soft-bounded walk X(i+1) = clamp(X(i) + Y(i), −B, B).
pub fn bound_series(increments: &Series, bound: f64, start: f64) -> Result<Series> {
    require_steps(increments, "bound_series")?;
    if !(bound > 0.0) {
        return Err(Error::param(format!("bound must be > 0, got {bound}")));
    }
    let mut x = start.clamp(-bound, bound);
    let values = increments
        .values
        .iter()
        .map(|&y| {
            x = (x + y).clamp(-bound, bound);
            x
        })
        .collect();
    Ok(increments.derive(
        values,
        SeriesKind::Bounded,
        format!("bound(B={bound}, start={start})"),
    ))
}

/// Fractional-sum weights Γ(j+d) / (Γ(d) Γ(j+1)) for j < n_terms, by the
/// recursion w_j = w_{j−1} (j−1+d) / j.
pub fn fractional_weights(d: f64, n_terms: usize) -> Result<Vec<f64>> {
    check_memory(d)?;
    if n_terms == 0 {
        return Err(Error::param("n_terms must be at least 1"));
    }
    let mut w = Vec::with_capacity(n_terms);
    w.push(1.0);
    for j in 1..n_terms {
        let prev = w[j - 1];
        w.push(prev * (j as f64 - 1.0 + d) / j as f64);
    }
    Ok(w)
}

/// Work (N × K) above which the FFT convolution path is used.
const DIRECT_WORK_LIMIT: usize = 1 << 24;

/// Causal truncated convolution out[i] = Σ_{j ≤ min(i, K−1)} w_j z[i−j].
pub(crate) fn causal_convolve(z: &[f64], w: &[f64]) -> Vec<f64> {
    let k = w.len().min(z.len());
    if k == 0 {
        return Vec::new();
    }
    if z.len().saturating_mul(k) <= DIRECT_WORK_LIMIT {
        convolve_direct(z, &w[..k])
    } else {
        convolve_fft(z, &w[..k])
    }
}

pub(crate) fn convolve_direct(z: &[f64], w: &[f64]) -> Vec<f64> {
    (0..z.len())
        .map(|i| {
            let terms = w.len().min(i + 1);
            (0..terms).map(|j| w[j] * z[i - j]).sum()
        })
        .collect()
}

pub(crate) fn convolve_fft(z: &[f64], w: &[f64]) -> Vec<f64> {
    let n = z.len();
    let size = (n + w.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut a: Vec<Complex<f64>> = z.iter().map(|&v| Complex::new(v, 0.0)).collect();
    a.resize(size, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = w.iter().map(|&v| Complex::new(v, 0.0)).collect();
    b.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    inv.process(&mut a);
    let scale = 1.0 / size as f64;
    a.iter().take(n).map(|c| c.re * scale).collect()
}

/// Fractional sum of `increments` with memory `d`, truncated to `n_terms`
/// weights. Early samples use only the history available.
pub fn fractional_revert(increments: &Series, d: f64, n_terms: usize) -> Result<Series> {
    require_steps(increments, "fractional_revert")?;
    let values = fractional_revert_values(&increments.values, d, n_terms)?;
    Ok(increments.derive(
        values,
        SeriesKind::Reverted,
        format!("fractional_revert(d={d}, n_terms={n_terms})"),
    ))
}

pub fn fractional_revert_values(z: &[f64], d: f64, n_terms: usize) -> Result<Vec<f64>> {
    check_memory(d)?;
    if n_terms == 0 {
        return Err(Error::param("n_terms must be at least 1"));
    }
    if d == 0.0 {
        return Ok(z.to_vec());
    }
    let w = fractional_weights(d, n_terms.min(z.len().max(1)))?;
    Ok(causal_convolve(z, &w))
}
