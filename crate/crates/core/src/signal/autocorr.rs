use super::{mean, NormalizedSeries, SignalError};
use crate::scalar::Scalar;

/// Normalized autocorrelation of the mean-removed signal for lags
/// `0..=N/2`.
///
/// Each lag uses the unbiased lag-product mean (divided by the number of
/// overlapping pairs) relative to the lag-0 power, so `r(0) = 1` and a
/// signal that repeats exactly every `P` samples has `r(P) = 1`.
pub fn autocorrelation<T: Scalar>(s: &NormalizedSeries<T>) -> Result<Vec<T>, SignalError> {
    s.require_varying()?;
    let v = s.values();
    let n = v.len();
    let m = mean(v);
    let x: Vec<T> = v.iter().map(|&vi| vi - m).collect();
    let power = x.iter().map(|&xi| xi * xi).sum::<T>() / T::from_count(n);
    if power <= T::zero() {
        return Err(SignalError::Degenerate);
    }
    let r = (0..=n / 2)
        .map(|lag| {
            if lag == 0 {
                return T::one();
            }
            let pairs = n - lag;
            let acc: T = x[..pairs].iter().zip(&x[lag..]).map(|(&a, &b)| a * b).sum();
            acc / T::from_count(pairs) / power
        })
        .collect();
    Ok(r)
}
