//! Signal containers, preprocessing and the numeric kernels shared by the
//! detectors.
//!
//! Samples carry no explicit timestamps: a series of length `N` is treated as
//! sampled on the uniform grid `t_i = i / (N - 1)` over `[0, 1]`.

mod autocorr;
mod filters;
mod fit;
mod transport;

pub use autocorr::autocorrelation;
pub use filters::{median_filter, moving_average};
pub use fit::{polyfit, PolyFit};
pub use transport::wasserstein1;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("series too short: {0}")]
    TooShort(String),
    #[error("degenerate (constant) series")]
    Degenerate,
}

/// A raw one-dimensional signal: finite samples, at least [`Series::MIN_LEN`] of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    values: Vec<T>,
}

impl<T: Scalar> Series<T> {
    /// Smallest length for which every detector is defined (two samples per
    /// segment at eight segments).
    pub const MIN_LEN: usize = 16;

    pub fn new(values: Vec<T>) -> Result<Self, SignalError> {
        check_finite(&values)?;
        if values.len() < Self::MIN_LEN {
            return Err(SignalError::TooShort(format!(
                "{} samples, need at least {}",
                values.len(),
                Self::MIN_LEN
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }

    pub fn normalize(&self) -> NormalizedSeries<T> {
        minmax_normalize(self)
    }

    /// Linear resampling to `target_len` samples.
    pub fn resample(&self, target_len: usize) -> Result<Self, SignalError> {
        let values = resample_linear(&self.values, target_len)?;
        Self::new(values)
    }
}

/// Min-max scaled samples in `[0, 1]`.
///
/// A non-degenerate series has minimum exactly 0 and maximum exactly 1; a
/// degenerate one (constant source) is all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries<T> {
    values: Vec<T>,
    degenerate: bool,
}

impl<T: Scalar> NormalizedSeries<T> {
    /// Normalizes an arbitrary non-empty slice of finite samples.
    pub fn from_raw(values: &[T]) -> Result<Self, SignalError> {
        check_finite(values)?;
        if values.is_empty() {
            return Err(SignalError::InvalidSignal("empty series".into()));
        }
        Ok(normalize_slice(values))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            values,
            degenerate: self.degenerate,
        }
    }

    pub(crate) fn require_varying(&self) -> Result<(), SignalError> {
        if self.degenerate {
            Err(SignalError::Degenerate)
        } else {
            Ok(())
        }
    }
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<(), SignalError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(SignalError::InvalidSignal(format!(
            "non-finite sample at index {i}"
        ))),
        None => Ok(()),
    }
}

pub(crate) fn min_max<T: Scalar>(values: &[T]) -> (T, T) {
    values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn normalize_slice<T: Scalar>(values: &[T]) -> NormalizedSeries<T> {
    let (lo, hi) = min_max(values);
    if hi == lo {
        return NormalizedSeries {
            values: vec![T::zero(); values.len()],
            degenerate: true,
        };
    }
    let span = hi - lo;
    let values = values
        .iter()
        .map(|&v| {
            if v == hi {
                T::one()
            } else {
                ((v - lo) / span).min(T::one())
            }
        })
        .collect();
    NormalizedSeries {
        values,
        degenerate: false,
    }
}

/// Min-max scaling to `[0, 1]`; a constant series maps to all zeros with the
/// degenerate flag set.
pub fn minmax_normalize<T: Scalar>(s: &Series<T>) -> NormalizedSeries<T> {
    normalize_slice(s.values())
}

/// Linear interpolation of `values` onto a uniform grid of `target_len`
/// points spanning the same interval. Endpoints are reproduced exactly.
pub fn resample_linear<T: Scalar>(values: &[T], target_len: usize) -> Result<Vec<T>, SignalError> {
    if target_len < 2 {
        return Err(SignalError::InvalidArgument(format!(
            "target length {target_len} < 2"
        )));
    }
    if values.len() < 2 {
        return Err(SignalError::InvalidArgument(format!(
            "cannot interpolate {} sample(s)",
            values.len()
        )));
    }
    let n = values.len();
    let intervals = target_len - 1;
    let out = (0..target_len)
        .map(|j| {
            // Exact integer position: j * (n - 1) / (target_len - 1).
            let num = j * (n - 1);
            let i = num / intervals;
            let rem = num % intervals;
            if rem == 0 {
                return values[i];
            }
            let (a, b) = (values[i], values[i + 1]);
            let frac = T::from_count(rem) / T::from_count(intervals);
            (a + frac * (b - a)).max(a.min(b)).min(a.max(b))
        })
        .collect();
    Ok(out)
}

/// `k` equal-length, ordered, disjoint slices covering a prefix of a series.
#[derive(Debug, Clone, Copy)]
pub struct Segmentation<'a, T> {
    prefix: &'a [T],
    seg_len: usize,
}

impl<'a, T> Segmentation<'a, T> {
    pub fn count(&self) -> usize {
        self.prefix.len() / self.seg_len
    }

    pub fn segment_len(&self) -> usize {
        self.seg_len
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'a, T> {
        self.prefix.chunks_exact(self.seg_len)
    }

    pub fn get(&self, i: usize) -> Option<&'a [T]> {
        self.prefix.chunks_exact(self.seg_len).nth(i)
    }
}

/// Splits `values` into `k` slices of length `floor(N / k)`, dropping the
/// trailing remainder.
pub fn segment<T>(values: &[T], k: usize) -> Result<Segmentation<'_, T>, SignalError> {
    if k == 0 {
        return Err(SignalError::InvalidArgument("segment count must be positive".into()));
    }
    let seg_len = values.len() / k;
    if seg_len < 2 {
        return Err(SignalError::TooShort(format!(
            "{} samples into {k} segments leaves {seg_len} per segment",
            values.len()
        )));
    }
    Ok(Segmentation {
        prefix: &values[..seg_len * k],
        seg_len,
    })
}

/// Uniform timestamps `i / (n - 1)` on `[0, 1]`.
pub(crate) fn time_grid<T: Scalar>(n: usize) -> Vec<T> {
    let denom = T::from_count(n.saturating_sub(1).max(1));
    (0..n).map(|i| T::from_count(i) / denom).collect()
}

pub(crate) fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_count(values.len())
}

/// Population variance.
pub(crate) fn variance<T: Scalar>(values: &[T]) -> T {
    let m = mean(values);
    values.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::from_count(values.len())
}

pub(crate) fn mse<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        / T::from_count(a.len())
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub(crate) fn median<T: Scalar>(values: &[T]) -> T {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::lit(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn normalize_affine_endpoints() {
        let s = NormalizedSeries::from_raw(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 0.5, 1.0]);
        assert!(!s.is_degenerate());
    }

    #[test]
    fn normalize_constant_is_degenerate() {
        let s = NormalizedSeries::from_raw(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        assert_eq!(s.values(), &[0.0; 4]);
        assert!(s.is_degenerate());
        assert_eq!(s.require_varying(), Err(SignalError::Degenerate));
    }

    #[test]
    fn normalize_is_idempotent() {
        let raw = [0.3, -1.2, 7.5, 2.2, 0.0];
        let once = NormalizedSeries::from_raw(&raw).unwrap();
        let twice = NormalizedSeries::from_raw(once.values()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn non_finite_rejected() {
        let err = NormalizedSeries::from_raw(&[0.0, f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, SignalError::InvalidSignal(_)));
        let mut v = vec![0.0; 20];
        v[3] = f64::INFINITY;
        assert!(matches!(Series::new(v), Err(SignalError::InvalidSignal(_))));
    }

    #[test]
    fn series_minimum_length() {
        assert!(matches!(
            Series::new(vec![0.0f64; 8]),
            Err(SignalError::TooShort(_))
        ));
        assert!(Series::new(vec![0.0f64; 16]).is_ok());
    }

    #[test]
    fn resample_two_points() {
        let out = resample_linear(&[0.0, 1.0], 5).unwrap();
        assert_eq!(out, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn resample_identity_grid() {
        let v = vec![3.0, -1.0, 4.0, 1.0, -5.0, 9.0];
        assert_eq!(resample_linear(&v, v.len()).unwrap(), v);
    }

    #[test]
    fn resample_ramp_to_2048() {
        let out = resample_linear(&ramp(300), 2048).unwrap();
        assert_eq!(out.len(), 2048);
        // closed-form line evaluated on the target grid
        let worst = out
            .iter()
            .enumerate()
            .map(|(j, &v)| (v - j as f64 / 2047.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "max deviation {worst}");
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2047], 1.0);
    }

    #[test]
    fn resample_rejects_short_target() {
        assert!(matches!(
            resample_linear(&[0.0, 1.0, 2.0], 1),
            Err(SignalError::InvalidArgument(_))
        ));
    }

    #[test]
    fn segmentation_drops_tail() {
        let v = vec![0.0; 2048];
        let seg = segment(&v, 10).unwrap();
        assert_eq!(seg.count(), 10);
        assert_eq!(seg.segment_len(), 204);
        assert_eq!(seg.iter().map(<[f64]>::len).sum::<usize>(), 2040);
    }

    #[test]
    fn segmentation_limits() {
        let v: Vec<f64> = (0..16).map(f64::from).collect();
        let seg = segment(&v, 8).unwrap();
        assert_eq!(seg.count(), 8);
        assert_eq!(seg.get(7).unwrap(), &[14.0, 15.0]);
        assert!(matches!(segment(&v, 9), Err(SignalError::TooShort(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let s = Series::new((0..32).map(|i| i as f32 * 0.5 - 3.0).collect()).unwrap();
        let n = s.normalize();
        assert_eq!(n.values()[0], 0.0f32);
        assert_eq!(n.values()[31], 1.0f32);
        assert_eq!(s.resample(64).unwrap().len(), 64);
    }
}
