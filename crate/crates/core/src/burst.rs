//! Threshold crossings, burst / inter-burst durations and the duration-PDF
//! Hurst estimate H = 2 − η from P(T) ~ T^{−η}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{log_histogram_discrete, loglog_fit, ExponentFit, LogHistogram};

pub const DEFAULT_FIT_RANGE: (u64, u64) = (5, 500);
pub const DEFAULT_MULTIPLIERS: [f64; 3] = [0.5, 1.0, 1.5];

/// Indices i ≥ 1 where x[i−1] and x[i] sit on different sides of `threshold`.
/// Values equal to the threshold count as above.
pub fn find_crossings(x: &[f64], threshold: f64) -> Vec<usize> {
    x.windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] >= threshold) != (w[1] >= threshold))
        .map(|(i, _)| i + 1)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationSample {
    pub threshold: f64,
    /// Ticks spent at or above the threshold between an up- and a down-crossing.
    pub bursts: Vec<u64>,
    /// Ticks spent below the threshold between a down- and an up-crossing.
    pub interbursts: Vec<u64>,
    /// Censored segments before the first / after the last crossing.
    pub discarded_edges: usize,
    /// Tick lengths of the censored segments, summed over merged samples.
    pub edge_ticks: u64,
}

impl DurationSample {
    fn empty(threshold: f64) -> Self {
        DurationSample {
            threshold,
            bursts: Vec::new(),
            interbursts: Vec::new(),
            discarded_edges: 0,
            edge_ticks: 0,
        }
    }

    pub fn total_ticks(&self) -> u64 {
        self.bursts.iter().sum::<u64>() + self.interbursts.iter().sum::<u64>() + self.edge_ticks
    }

    /// Pools another sample (e.g. the next trading day) into this one.
    pub fn merge(&mut self, other: &DurationSample) {
        self.bursts.extend_from_slice(&other.bursts);
        self.interbursts.extend_from_slice(&other.interbursts);
        self.discarded_edges += other.discarded_edges;
        self.edge_ticks += other.edge_ticks;
    }

    pub fn select(&self, which: DurationKind) -> Vec<u64> {
        match which {
            DurationKind::Burst => self.bursts.clone(),
            DurationKind::InterBurst => self.interbursts.clone(),
            DurationKind::Both => {
                let mut v = self.bursts.clone();
                v.extend_from_slice(&self.interbursts);
                v
            }
        }
    }
}

/// Splits `x` at its threshold crossings. Edge segments are censored and
/// only counted.
pub fn durations(x: &[f64], threshold: f64) -> Result<DurationSample> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let crossings = find_crossings(x, threshold);
    let last_index = (x.len() - 1) as u64;
    let mut sample = DurationSample::empty(threshold);
    match (crossings.first(), crossings.last()) {
        (Some(&first), Some(&last)) => {
            sample.discarded_edges = 2;
            sample.edge_ticks = first as u64 + (last_index - last as u64);
        }
        _ => {
            sample.discarded_edges = 1;
            sample.edge_ticks = last_index;
            return Ok(sample);
        }
    }
    for w in crossings.windows(2) {
        let len = (w[1] - w[0]) as u64;
        if x[w[0]] >= threshold {
            sample.bursts.push(len);
        } else {
            sample.interbursts.push(len);
        }
    }
    Ok(sample)
}

pub fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.is_empty() {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Duration samples at thresholds `multiplier × σ(x)`.
pub fn threshold_sweep(x: &[f64], multipliers: &[f64]) -> Result<Vec<(f64, DurationSample)>> {
    let sigma = std_dev(x);
    if !(sigma > 0.0) {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    multipliers
        .iter()
        .map(|&m| Ok((m, durations(x, m * sigma)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DurationKind {
    Burst,
    InterBurst,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstFit {
    pub eta: f64,
    pub h_bd: f64,
    pub fit: ExponentFit,
    pub which: DurationKind,
    pub n_durations: usize,
    pub histogram: LogHistogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstFitConfig {
    pub fit_range: (u64, u64),
    pub bins_per_decade: usize,
    pub min_durations: usize,
}

impl Default for BurstFitConfig {
    fn default() -> Self {
        BurstFitConfig {
            fit_range: DEFAULT_FIT_RANGE,
            bins_per_decade: 10,
            min_durations: 100,
        }
    }
}

/// Power-law fit of the duration PDF over bins lying wholly inside
/// `fit_range`; H_BD = 2 − η.
pub fn fit_burst_pdf(
    sample: &DurationSample,
    which: DurationKind,
    cfg: &BurstFitConfig,
) -> Result<BurstFit> {
    let values = sample.select(which);
    if values.len() < cfg.min_durations {
        return Err(Error::InsufficientData(format!(
            "{} durations, need {}",
            values.len(),
            cfg.min_durations
        )));
    }
    let (lo, hi) = cfg.fit_range;
    if lo == 0 || hi <= lo {
        return Err(Error::param(format!("bad fit range ({lo}, {hi})")));
    }
    let max = *values.iter().max().unwrap();
    if lo > max {
        return Err(Error::InsufficientData(format!(
            "fit range starts at {lo} but the longest duration is {max}"
        )));
    }
    let histogram = log_histogram_discrete(&values, cfg.bins_per_decade)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..histogram.n_bins() {
        let first = histogram.bin_edges[i];
        let last = histogram.bin_edges[i + 1] - 1.0;
        if first >= lo as f64 && last <= hi as f64 && histogram.counts[i] > 0 {
            xs.push(histogram.centers[i]);
            ys.push(histogram.densities[i]);
        }
    }
    let fit = loglog_fit(&xs, &ys, |s| -s)?;
    Ok(BurstFit {
        eta: fit.exponent,
        h_bd: 2.0 - fit.exponent,
        fit,
        which,
        n_durations: values.len(),
        histogram,
    })
}
