//! Whole-signal shape scores: trend, curvature, linearity, periodicity and
//! symmetry.

use super::DetectorParams;
use crate::scalar::Scalar;
use crate::signal::{autocorrelation, mean, mse, polyfit, time_grid, NormalizedSeries, SignalError};

/// Pearson correlation between the samples and the uniform time grid.
pub fn score_trend<T: Scalar>(s: &NormalizedSeries<T>) -> Result<T, SignalError> {
    s.require_varying()?;
    let v = s.values();
    let t = time_grid::<T>(v.len());
    let (mt, mv) = (mean(&t), mean(v));
    let (mut stv, mut stt, mut svv) = (T::zero(), T::zero(), T::zero());
    for (&ti, &vi) in t.iter().zip(v) {
        let (dt, dv) = (ti - mt, vi - mv);
        stv = stv + dt * dv;
        stt = stt + dt * dt;
        svv = svv + dv * dv;
    }
    Ok((stv / (stt.sqrt() * svv.sqrt())).max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature<T> {
    /// Linear-fit mse minus quadratic-fit mse; never negative.
    pub gap: T,
    /// Sign of the fitted quadratic coefficient (0 when negligible).
    pub sign: i8,
}

pub fn score_curvature<T: Scalar>(s: &NormalizedSeries<T>) -> Result<Curvature<T>, SignalError> {
    let lin = polyfit(s, 1)?;
    let quad = polyfit(s, 2)?;
    let gap = (lin.mse - quad.mse).max(T::zero());
    let c2 = quad.coefficients[2];
    let sign = if c2.abs() <= T::epsilon().sqrt() {
        0
    } else if c2 > T::zero() {
        1
    } else {
        -1
    };
    Ok(Curvature { gap, sign })
}

/// Per-point mse of the least-squares line.
pub fn score_linearity<T: Scalar>(s: &NormalizedSeries<T>) -> Result<T, SignalError> {
    Ok(polyfit(s, 1)?.mse)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Periodicity<T> {
    /// `e_periodic - e_linear`; `+inf` when no period candidate exists.
    pub score: T,
    /// Cycle length used for the periodic reconstruction.
    pub lag: Option<usize>,
    pub e_periodic: T,
    pub e_linear: T,
}

/// Compares a periodic reconstruction of the signal against a straight-line
/// fit.
///
/// Candidate cycle lengths are autocorrelation lags that are local maxima
/// with a negative second difference. The lag with the largest
/// autocorrelation (smallest on ties) defines one cycle; tiling the first
/// cycle over the whole length gives the periodic curve. Negative scores
/// mean the periodic curve explains the signal better than the line.
pub fn score_periodicity<T: Scalar>(s: &NormalizedSeries<T>) -> Result<Periodicity<T>, SignalError> {
    let r = autocorrelation(s)?;
    let e_linear = polyfit(s, 1)?.mse;

    // peaks before the first zero crossing belong to the central lobe
    let first_negative = r.iter().position(|&x| x < T::zero()).unwrap_or(r.len());
    let mut best: Option<(usize, T)> = None;
    for lag in first_negative.max(2)..r.len().saturating_sub(1) {
        let (prev, here, next) = (r[lag - 1], r[lag], r[lag + 1]);
        let second_diff = next - here - here + prev;
        let is_peak = here >= prev && here >= next && second_diff < T::zero();
        if is_peak && best.map_or(true, |(_, b)| here > b) {
            best = Some((lag, here));
        }
    }

    let Some((lag, _)) = best else {
        return Ok(Periodicity {
            score: T::infinity(),
            lag: None,
            e_periodic: T::infinity(),
            e_linear,
        });
    };
    let v = s.values();
    let tiled: Vec<T> = (0..v.len()).map(|i| v[i % lag]).collect();
    let e_periodic = mse(&tiled, v);
    Ok(Periodicity {
        score: e_periodic - e_linear,
        lag: Some(lag),
        e_periodic,
        e_linear,
    })
}

fn flip_error<T: Scalar>(padded: &[T]) -> T {
    let n = padded.len();
    // mse(x, reverse(x)) counts each mirrored pair twice.
    let half: T = (0..n / 2)
        .map(|i| {
            let d = padded[i] - padded[n - 1 - i];
            d * d
        })
        .sum();
    (half + half) / T::from_count(n)
}

/// Smallest mse between an edge-padded copy of the signal and its mirror
/// image, over front and back pad widths `0, step, 2 step, ..., N/2`.
pub fn score_symmetry<T: Scalar>(s: &NormalizedSeries<T>, p: &DetectorParams) -> Result<T, SignalError> {
    p.validate()?;
    let v = s.values();
    let n = v.len();
    if n == 0 {
        return Err(SignalError::InvalidSignal("empty series".into()));
    }
    let step = p.pad_step(n);
    let (first, last) = (v[0], v[n - 1]);
    let mut best = flip_error(v);
    let mut padded = Vec::with_capacity(n + n / 2);
    let mut width = step;
    while width <= n / 2 {
        padded.clear();
        padded.extend(std::iter::repeat(first).take(width));
        padded.extend_from_slice(v);
        best = best.min(flip_error(&padded));

        padded.clear();
        padded.extend_from_slice(v);
        padded.extend(std::iter::repeat(last).take(width));
        best = best.min(flip_error(&padded));
        width += step;
    }
    Ok(best)
}
