//! Scaling-exponent estimators: sample MSD, autocovariance, the Absolute
//! Value Estimator, Higuchi's path length and power-law tail fits, plus the
//! log-log regression and log-binned histograms they share.

mod autocov;
mod ave;
mod fit;
mod grid;
mod higuchi;
mod hist;
mod msd;
mod tail;

pub use autocov::autocovariance;
pub use ave::ave_hurst;
pub(crate) use fit::loglog_fit;
pub use fit::ExponentFit;
pub use grid::{ave_block_grid, geometric_grid, higuchi_window_grid, log_spaced_lags};
pub use higuchi::{higuchi_hurst, higuchi_length};
pub use hist::{log_histogram, log_histogram_discrete, LogHistogram};
pub use msd::{default_msd_lags, fit_msd_exponent, msd_lags, sample_msd, MsdFit};
pub use tail::{hill_nu, tail_fit, TailConfig, TailFit, TailSide};
