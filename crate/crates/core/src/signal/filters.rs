use super::SignalError;
use crate::scalar::Scalar;

fn replicate<T: Copy>(values: &[T], i: isize) -> T {
    let last = values.len() as isize - 1;
    values[i.clamp(0, last) as usize]
}

fn check_window(n: usize, window: usize) -> Result<(), SignalError> {
    if window == 0 {
        return Err(SignalError::InvalidArgument("window must be positive".into()));
    }
    if window > n {
        return Err(SignalError::InvalidArgument(format!(
            "window {window} exceeds series length {n}"
        )));
    }
    Ok(())
}

/// Sliding-window median with edge-replication padding. Output has the same
/// length as the input.
pub fn median_filter<T: Scalar>(values: &[T], window: usize) -> Result<Vec<T>, SignalError> {
    if window % 2 == 0 {
        return Err(SignalError::InvalidArgument(format!(
            "median window {window} must be odd"
        )));
    }
    check_window(values.len(), window)?;
    let half = (window / 2) as isize;
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("finite samples");

    // Sorted copy of the current window, updated incrementally.
    let mut sorted: Vec<T> = (-half..=half).map(|j| replicate(values, j)).collect();
    sorted.sort_by(cmp);

    let mut out = Vec::with_capacity(values.len());
    for i in 0..values.len() as isize {
        out.push(sorted[half as usize]);
        let leaving = replicate(values, i - half);
        let entering = replicate(values, i + half + 1);
        let pos = sorted.partition_point(|x| cmp(x, &leaving).is_lt());
        sorted.remove(pos);
        let pos = sorted.partition_point(|x| cmp(x, &entering).is_lt());
        sorted.insert(pos, entering);
    }
    Ok(out)
}

/// Centered sliding mean with edge-replication padding.
///
/// Even windows take one more sample on the left than on the right. Each
/// output is clamped to its window's range so rounding can never leave it.
pub fn moving_average<T: Scalar>(values: &[T], window: usize) -> Result<Vec<T>, SignalError> {
    check_window(values.len(), window)?;
    let left = (window / 2) as isize;
    let right = window as isize - 1 - left;
    let w = T::from_count(window);
    let out = (0..values.len() as isize)
        .map(|i| {
            let mut sum = T::zero();
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            for j in (i - left)..=(i + right) {
                let v = replicate(values, j);
                sum = sum + v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (sum / w).max(lo).min(hi)
        })
        .collect();
    Ok(out)
}
