//! Order-disbalance time series from limit-order-book data and the
//! self-similarity / long-memory estimators used to separate the effect of
//! heavy-tailed increments (stability index α) from that of memory (d).
//!
//! Modules follow the data flow:
//!
//! * [`lob`]: LOBSTER parsing, disbalance X(j), increments, daily joins
//! * [`transform`]: shuffling, soft bounding, ARFIMA(0,d,0) fractional sums
//! * [`synth`]: Gaussian / stable / Pareto noise and accumulated ARFIMA paths
//! * [`estimators`]: MSD, autocovariance, AVE, Higuchi, tail fits
//! * [`burst`]: threshold crossings and duration-PDF exponents
//! * [`pipeline`]: per-stock runs, reports, aggregation, export

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burst;
pub mod error;
pub mod estimators;
pub mod lob;
pub mod pipeline;
pub mod series;
pub mod synth;
pub mod transform;

pub use error::{Error, Result};
pub use series::{Series, SeriesKind, SeriesMeta};
