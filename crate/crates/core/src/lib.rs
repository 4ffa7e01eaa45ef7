//! Descriptive classes, base captions and synthetic signals for
//! one-dimensional time series.
//!
//! The backward direction scores a series with the detectors and thresholds
//! the scores into classes ([`annotator`]), which map to base captions
//! ([`captioner`]). The forward direction builds a series from a named shape
//! and overlays ([`synth`]). [`pipeline`] turns CSV files or synthetic specs
//! into JSONL datasets and [`evalkit`] scores captions and runs the
//! nearest-neighbour baseline.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choice.

pub mod annotator;
pub mod captioner;
pub mod detectors;
pub mod evalkit;
pub mod pipeline;
pub mod scalar;
pub mod signal;
pub mod synth;

pub use scalar::Scalar;

pub type Series64 = signal::Series<f64>;
pub type Series32 = signal::Series<f32>;
pub type NormalizedSeries64 = signal::NormalizedSeries<f64>;
pub type NormalizedSeries32 = signal::NormalizedSeries<f32>;
pub type ScoreVector64 = detectors::ScoreVector<f64>;
pub type ScoreVector32 = detectors::ScoreVector<f32>;
pub type Annotation64 = annotator::Annotation<f64>;
