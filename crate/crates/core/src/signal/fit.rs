use super::{time_grid, NormalizedSeries, SignalError};
use crate::scalar::Scalar;

/// Least-squares polynomial fit against the uniform time grid on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit<T> {
    /// Coefficients in ascending order of power: `c0 + c1 t (+ c2 t^2)`.
    pub coefficients: Vec<T>,
    /// Mean squared residual per point.
    pub mse: T,
}

impl<T: Scalar> PolyFit<T> {
    pub fn eval(&self, t: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Fits a degree-1 or degree-2 polynomial by a thin QR factorisation of the
/// Vandermonde matrix (modified Gram-Schmidt with one re-orthogonalisation
/// pass).
pub fn polyfit<T: Scalar>(s: &NormalizedSeries<T>, degree: usize) -> Result<PolyFit<T>, SignalError> {
    if !(1..=2).contains(&degree) {
        return Err(SignalError::InvalidArgument(format!(
            "polynomial degree {degree} not in 1..=2"
        )));
    }
    s.require_varying()?;
    let y = s.values();
    let n = y.len();
    if n <= degree {
        return Err(SignalError::TooShort(format!(
            "{n} samples cannot determine a degree-{degree} fit"
        )));
    }
    let t = time_grid::<T>(n);
    let cols = degree + 1;

    let mut q: Vec<Vec<T>> = Vec::with_capacity(cols);
    let mut r = vec![vec![T::zero(); cols]; cols];
    for j in 0..cols {
        let mut v: Vec<T> = t.iter().map(|&ti| ti.powi(j as i32)).collect();
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let proj = dot(qi, &v);
                r[i][j] = r[i][j] + proj;
                v.iter_mut().zip(qi).for_each(|(vk, &qk)| *vk = *vk - proj * qk);
            }
        }
        let norm = dot(&v, &v).sqrt();
        r[j][j] = norm;
        v.iter_mut().for_each(|vk| *vk = *vk / norm);
        q.push(v);
    }

    let qty: Vec<T> = q.iter().map(|qi| dot(qi, y)).collect();
    let mut coefficients = vec![T::zero(); cols];
    for i in (0..cols).rev() {
        let tail: T = ((i + 1)..cols).map(|j| r[i][j] * coefficients[j]).sum();
        coefficients[i] = (qty[i] - tail) / r[i][i];
    }

    let fit = PolyFit {
        coefficients,
        mse: T::zero(),
    };
    let mse = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let e = yi - fit.eval(ti);
            e * e
        })
        .sum::<T>()
        / T::from_count(n);
    Ok(PolyFit { mse, ..fit })
}
