use super::SignalError;
use crate::scalar::Scalar;

fn sorted<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    v
}

/// First Wasserstein distance between the empirical distributions of two
/// sample sets.
///
/// Computed as the L1 distance between the two quantile functions. For equal
/// sizes this is the mean absolute difference of the sorted samples.
pub fn wasserstein1<T: Scalar>(a: &[T], b: &[T]) -> Result<T, SignalError> {
    if a.is_empty() || b.is_empty() {
        return Err(SignalError::InvalidArgument("empty sample set".into()));
    }
    let a = sorted(a);
    let b = sorted(b);
    let (n, m) = (a.len(), b.len());
    if n == m {
        let total: T = a.iter().zip(&b).map(|(&x, &y)| (x - y).abs()).sum();
        return Ok(total / T::from_count(n));
    }

    // Quantile levels as integers over the common denominator n * m.
    let (mut i, mut j, mut level) = (0usize, 0usize, 0usize);
    let mut total = T::zero();
    while i < n && j < m {
        let next_a = (i + 1) * m;
        let next_b = (j + 1) * n;
        let next = next_a.min(next_b);
        total = total + (a[i] - b[j]).abs() * T::from_count(next - level);
        level = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    Ok(total / T::from_count(n * m))
}
