use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Histogram on geometric bins `[edge_i, edge_{i+1})`, density-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHistogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<u64>,
    /// Abscissa used for plotting and fitting each bin.
    pub centers: Vec<f64>,
    /// Width each density is normalized against; equals the edge gap for
    /// continuous data and the number of integers covered for discrete data.
    pub widths: Vec<f64>,
}

impl LogHistogram {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Σ density · width; 1 up to rounding for a non-empty histogram.
    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(&self.widths)
            .map(|(d, w)| d * w)
            .sum()
    }

    /// `bin_center,density,count` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,density,count\n");
        for i in 0..self.n_bins() {
            let _ = writeln!(
                out,
                "{},{},{}",
                self.centers[i], self.densities[i], self.counts[i]
            );
        }
        out
    }

    fn from_counts(edges: Vec<f64>, counts: Vec<u64>, widths: Vec<f64>, centers: Vec<f64>) -> Self {
        let total: u64 = counts.iter().sum();
        let densities = counts
            .iter()
            .zip(&widths)
            .map(|(&c, &w)| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / (total as f64 * w)
                }
            })
            .collect();
        LogHistogram {
            bin_edges: edges,
            densities,
            counts,
            centers,
            widths,
        }
    }
}

fn bin_index(edges: &[f64], x: f64) -> usize {
    // Largest i with edges[i] <= x.
    edges.partition_point(|&e| e <= x).saturating_sub(1)
}

/// Geometric bins starting at the smallest sample, `bins_per_decade` per
/// decade, extended until the largest sample falls strictly inside.
pub fn log_histogram(samples: &[f64], bins_per_decade: usize) -> Result<LogHistogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins_per_decade == 0 {
        return Err(Error::param("bins_per_decade must be at least 1"));
    }
    if let Some(bad) = samples.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::param(format!(
            "log histogram needs positive finite samples, found {bad}"
        )));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = 1.0 / bins_per_decade as f64;
    let mut edges = vec![lo];
    while *edges.last().unwrap() <= hi {
        let k = edges.len() as f64;
        edges.push(lo * 10f64.powf(k * step));
    }
    let n_bins = edges.len() - 1;
    let mut counts = vec![0u64; n_bins];
    for &x in samples {
        counts[bin_index(&edges, x).min(n_bins - 1)] += 1;
    }
    let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let centers = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    Ok(LogHistogram::from_counts(edges, counts, widths, centers))
}

/// Log-binned histogram of positive integers (durations). Edges are the
/// distinct values ⌈10^{k/bpd}⌉ starting at 1, so each bin covers whole
/// integers and densities are per unit integer.
pub fn log_histogram_discrete(values: &[u64], bins_per_decade: usize) -> Result<LogHistogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins_per_decade == 0 {
        return Err(Error::param("bins_per_decade must be at least 1"));
    }
    if values.contains(&0) {
        return Err(Error::param("discrete log histogram needs values >= 1"));
    }
    let hi = *values.iter().max().unwrap();
    let step = 1.0 / bins_per_decade as f64;
    let mut edges: Vec<u64> = vec![1];
    let mut k = 1.0;
    while *edges.last().unwrap() <= hi {
        let e = 10f64.powf(k * step).ceil() as u64;
        if e > *edges.last().unwrap() {
            edges.push(e);
        }
        k += 1.0;
    }
    let fedges: Vec<f64> = edges.iter().map(|&e| e as f64).collect();
    let n_bins = edges.len() - 1;
    let mut counts = vec![0u64; n_bins];
    for &v in values {
        counts[bin_index(&fedges, v as f64)] += 1;
    }
    let widths = edges.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let centers = edges
        .windows(2)
        .map(|w| ((w[0] as f64) * ((w[1] - 1) as f64)).sqrt())
        .collect();
    Ok(LogHistogram::from_counts(fedges, counts, widths, centers))
}
