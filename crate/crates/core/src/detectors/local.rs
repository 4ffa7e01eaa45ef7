use super::DetectorParams;
use crate::scalar::Scalar;
use crate::signal::{median_filter, moving_average, mse, NormalizedSeries, SignalError};

/// Mse between the signal and its centered moving average.
pub fn score_smooth<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let v = s.values();
    let smoothed = moving_average(v, p.ma_window(v.len()))?;
    Ok(mse(&smoothed, v))
}

/// Noise energy left after a median filter, with isolated spikes suppressed.
///
/// The residual `r = s - median(s)` still contains any spikes; median
/// filtering `|r|` keeps the typical local residual magnitude and drops
/// isolated excursions. The score is the mean square of that suppressed
/// residual.
pub fn score_noise<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let v = s.values();
    let w = p.median_window(v.len());
    let filtered = median_filter(v, w)?;
    let magnitude: Vec<T> = v.iter().zip(&filtered).map(|(&x, &m)| (x - m).abs()).collect();
    let suppressed = median_filter(&magnitude, w)?;
    Ok(suppressed.iter().map(|&m| m * m).sum::<T>() / T::from_count(v.len()))
}

/// Largest absolute response to step kernels.
///
/// A kernel of even length `L` is `-1/(L/2)` over its first half and
/// `+1/(L/2)` over its second half, so each response is the difference of
/// the two half-window means. Only positions where the kernel fits inside
/// the signal are evaluated.
pub fn score_step<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let v = s.values();
    let n = v.len();
    let lengths = p.step_kernel_lengths(n)?;

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(T::zero());
    for &x in v {
        let last = *prefix.last().expect("non-empty");
        prefix.push(last + x);
    }

    let mut best = T::zero();
    for l in lengths.into_iter().filter(|&l| l <= n) {
        let half = l / 2;
        let scale = T::from_count(half);
        for start in 0..=(n - l) {
            let left = prefix[start + half] - prefix[start];
            let right = prefix[start + l] - prefix[start + half];
            best = best.max(((right - left) / scale).abs());
        }
    }
    Ok(best)
}
