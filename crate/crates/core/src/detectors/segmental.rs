//! Scores computed per segment: distribution drift between segments, local
//! variance and spike excursions.

use super::DetectorParams;
use crate::scalar::Scalar;
use crate::signal::{median, median_filter, segment, variance, wasserstein1, NormalizedSeries, SignalError};

fn mean_pairwise_w1<T: Scalar>(values: &[T], k: usize) -> Result<T, SignalError> {
    let seg = segment(values, k)?;
    let parts: Vec<&[T]> = seg.iter().collect();
    let mut total = T::zero();
    let mut pairs = 0usize;
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            total = total + wasserstein1(parts[i], parts[j])?;
            pairs += 1;
        }
    }
    Ok(total / T::from_count(pairs))
}

/// Mean first Wasserstein distance over all unordered pairs of segments.
pub fn score_constancy<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    mean_pairwise_w1(s.values(), p.k_segments)
}

/// [`score_constancy`] applied to the first difference of the signal.
pub fn score_complexity<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let diff: Vec<T> = s.values().windows(2).map(|w| w[1] - w[0]).collect();
    mean_pairwise_w1(&diff, p.k_segments)
}

/// Largest per-segment population variance.
pub fn score_amplitude<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let seg = segment(s.values(), p.k_segments)?;
    Ok(seg.iter().map(variance).fold(T::zero(), T::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeDirection {
    Up,
    Down,
}

/// Largest excursion beyond a per-segment threshold.
///
/// With `sigma` the standard deviation of the median-filtered signal, each
/// segment's threshold is its median plus (up) or minus (down)
/// `spike_sigma * sigma`. Negative scores mean no sample crosses its
/// threshold.
pub fn score_spikes<T: Scalar>(
    s: &NormalizedSeries<T>,
    p: &DetectorParams,
    direction: SpikeDirection,
) -> Result<T, SignalError> {
    p.validate()?;
    let v = s.values();
    let filtered = median_filter(v, p.median_window(v.len()))?;
    let margin = T::lit(p.spike_sigma) * variance(&filtered).sqrt();
    let seg = segment(v, p.k_segments)?;
    let mut best = T::neg_infinity();
    for part in seg.iter() {
        let center = median(part);
        for &x in part {
            let excess = match direction {
                SpikeDirection::Up => x - (center + margin),
                SpikeDirection::Down => (center - margin) - x,
            };
            best = best.max(excess);
        }
    }
    Ok(best)
}
