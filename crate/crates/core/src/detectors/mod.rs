//! Score procedures for the descriptive time-series classes.
//!
//! Every detector consumes a min-max normalized series and returns a raw
//! score; the annotator turns scores into classes with thresholds. Scores are
//! per-point means wherever a sum over samples is involved, so the same
//! cutoffs apply across series lengths.

mod global;
mod local;
mod segmental;

pub use global::{
    score_curvature, score_linearity, score_periodicity, score_symmetry, score_trend, Curvature,
    Periodicity,
};
pub use local::{score_noise, score_smooth, score_step};
pub use segmental::{score_amplitude, score_complexity, score_constancy, score_spikes, SpikeDirection};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::signal::{NormalizedSeries, SignalError};

/// Window, segment and constant choices for the detectors. Fractions are
/// relative to the series length `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    pub k_segments: usize,
    pub ma_window_frac: f64,
    pub median_window_frac: f64,
    /// Multiplier `c` applied to the standard deviation of the
    /// median-filtered signal in the spike thresholds.
    pub spike_sigma: f64,
    pub symmetry_pad_step_frac: f64,
    pub step_kernel_fracs: Vec<f64>,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            k_segments: 10,
            ma_window_frac: 0.02,
            median_window_frac: 0.05,
            spike_sigma: 3.0,
            symmetry_pad_step_frac: 1.0 / 32.0,
            step_kernel_fracs: vec![1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0],
        }
    }
}

fn odd_window(frac: f64, n: usize) -> usize {
    let mut w = ((frac * n as f64).round() as usize).max(3);
    if w % 2 == 0 {
        w += 1;
    }
    if w > n {
        w = if n % 2 == 1 { n } else { n - 1 };
    }
    w
}

impl DetectorParams {
    pub fn validate(&self) -> Result<(), SignalError> {
        let fracs = [
            ("ma_window_frac", self.ma_window_frac),
            ("median_window_frac", self.median_window_frac),
            ("symmetry_pad_step_frac", self.symmetry_pad_step_frac),
        ];
        for (name, f) in fracs
            .into_iter()
            .chain(self.step_kernel_fracs.iter().map(|&f| ("step_kernel_fracs", f)))
        {
            if !(f > 0.0 && f <= 1.0) {
                return Err(SignalError::InvalidArgument(format!("{name} = {f} not in (0, 1]")));
            }
        }
        if self.k_segments < 2 {
            return Err(SignalError::InvalidArgument(format!(
                "k_segments = {} < 2",
                self.k_segments
            )));
        }
        if !(self.spike_sigma > 0.0 && self.spike_sigma.is_finite()) {
            return Err(SignalError::InvalidArgument(format!(
                "spike_sigma = {} must be positive",
                self.spike_sigma
            )));
        }
        if self.step_kernel_fracs.is_empty() {
            return Err(SignalError::InvalidArgument("no step kernel lengths".into()));
        }
        Ok(())
    }

    /// Odd moving-average window for a series of length `n` (at least 3).
    pub fn ma_window(&self, n: usize) -> usize {
        odd_window(self.ma_window_frac, n)
    }

    /// Odd median-filter window for a series of length `n` (at least 3).
    pub fn median_window(&self, n: usize) -> usize {
        odd_window(self.median_window_frac, n)
    }

    pub fn pad_step(&self, n: usize) -> usize {
        ((self.symmetry_pad_step_frac * n as f64).round() as usize).max(1)
    }

    /// Even step-kernel lengths, deduplicated and ascending.
    pub fn step_kernel_lengths(&self, n: usize) -> Result<Vec<usize>, SignalError> {
        let mut lengths = Vec::with_capacity(self.step_kernel_fracs.len());
        for &f in &self.step_kernel_fracs {
            let l = ((f * n as f64).floor() as usize) & !1;
            if l < 2 {
                return Err(SignalError::InvalidArgument(format!(
                    "step kernel fraction {f} gives length {l} < 2 for N = {n}"
                )));
            }
            lengths.push(l);
        }
        lengths.sort_unstable();
        lengths.dedup();
        Ok(lengths)
    }
}

/// Names of the individual scores, as used in threshold rules and dataset
/// records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreName {
    Trend,
    Constancy,
    Curvature,
    CurvatureSign,
    /// `curvature * curvature_sign`; positive for convex, negative for concave.
    CurvatureSigned,
    LinearityMse,
    SmoothMse,
    NoiseMse,
    Complexity,
    SpikePos,
    SpikeNeg,
    PeriodicityGap,
    SymmetryErr,
    StepResponse,
    AmplitudeVar,
}

impl ScoreName {
    pub const ALL: [ScoreName; 15] = [
        ScoreName::Trend,
        ScoreName::Constancy,
        ScoreName::Curvature,
        ScoreName::CurvatureSign,
        ScoreName::CurvatureSigned,
        ScoreName::LinearityMse,
        ScoreName::SmoothMse,
        ScoreName::NoiseMse,
        ScoreName::Complexity,
        ScoreName::SpikePos,
        ScoreName::SpikeNeg,
        ScoreName::PeriodicityGap,
        ScoreName::SymmetryErr,
        ScoreName::StepResponse,
        ScoreName::AmplitudeVar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreName::Trend => "trend",
            ScoreName::Constancy => "constancy",
            ScoreName::Curvature => "curvature",
            ScoreName::CurvatureSign => "curvature_sign",
            ScoreName::CurvatureSigned => "curvature_signed",
            ScoreName::LinearityMse => "linearity_mse",
            ScoreName::SmoothMse => "smooth_mse",
            ScoreName::NoiseMse => "noise_mse",
            ScoreName::Complexity => "complexity",
            ScoreName::SpikePos => "spike_pos",
            ScoreName::SpikeNeg => "spike_neg",
            ScoreName::PeriodicityGap => "periodicity_gap",
            ScoreName::SymmetryErr => "symmetry_err",
            ScoreName::StepResponse => "step_response",
            ScoreName::AmplitudeVar => "amplitude_var",
        }
    }
}

impl fmt::Display for ScoreName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScoreName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown score name '{s}'"))
    }
}

/// One raw score per detector family.
///
/// A degenerate (constant) series gets the sentinel vector from
/// [`ScoreVector::degenerate`]; `periodicity_gap` is `+inf` whenever no
/// period candidate exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<T> {
    pub trend: T,
    pub constancy: T,
    pub curvature: T,
    pub curvature_sign: i8,
    pub linearity_mse: T,
    pub smooth_mse: T,
    pub noise_mse: T,
    pub complexity: T,
    pub spike_pos: T,
    pub spike_neg: T,
    pub periodicity_gap: T,
    pub symmetry_err: T,
    pub step_response: T,
    pub amplitude_var: T,
    pub degenerate: bool,
}

impl<T: Scalar> ScoreVector<T> {
    /// Sentinel scores for a constant series: zero everywhere except
    /// `periodicity_gap`, which reports "no period found".
    pub fn degenerate() -> Self {
        Self {
            trend: T::zero(),
            constancy: T::zero(),
            curvature: T::zero(),
            curvature_sign: 0,
            linearity_mse: T::zero(),
            smooth_mse: T::zero(),
            noise_mse: T::zero(),
            complexity: T::zero(),
            spike_pos: T::zero(),
            spike_neg: T::zero(),
            periodicity_gap: T::infinity(),
            symmetry_err: T::zero(),
            step_response: T::zero(),
            amplitude_var: T::zero(),
            degenerate: true,
        }
    }

    pub fn get(&self, name: ScoreName) -> T {
        match name {
            ScoreName::Trend => self.trend,
            ScoreName::Constancy => self.constancy,
            ScoreName::Curvature => self.curvature,
            ScoreName::CurvatureSign => T::lit(f64::from(self.curvature_sign)),
            ScoreName::CurvatureSigned => self.curvature * T::lit(f64::from(self.curvature_sign)),
            ScoreName::LinearityMse => self.linearity_mse,
            ScoreName::SmoothMse => self.smooth_mse,
            ScoreName::NoiseMse => self.noise_mse,
            ScoreName::Complexity => self.complexity,
            ScoreName::SpikePos => self.spike_pos,
            ScoreName::SpikeNeg => self.spike_neg,
            ScoreName::PeriodicityGap => self.periodicity_gap,
            ScoreName::SymmetryErr => self.symmetry_err,
            ScoreName::StepResponse => self.step_response,
            ScoreName::AmplitudeVar => self.amplitude_var,
        }
    }

    /// The stored scores (every name except the derived `curvature_signed`)
    /// keyed by name.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        ScoreName::ALL
            .into_iter()
            .filter(|&n| n != ScoreName::CurvatureSigned)
            .map(|n| (n.as_str().to_string(), self.get(n).as_f64()))
            .collect()
    }

    pub fn to_f64(&self) -> ScoreVector<f64> {
        ScoreVector {
            trend: self.trend.as_f64(),
            constancy: self.constancy.as_f64(),
            curvature: self.curvature.as_f64(),
            curvature_sign: self.curvature_sign,
            linearity_mse: self.linearity_mse.as_f64(),
            smooth_mse: self.smooth_mse.as_f64(),
            noise_mse: self.noise_mse.as_f64(),
            complexity: self.complexity.as_f64(),
            spike_pos: self.spike_pos.as_f64(),
            spike_neg: self.spike_neg.as_f64(),
            periodicity_gap: self.periodicity_gap.as_f64(),
            symmetry_err: self.symmetry_err.as_f64(),
            step_response: self.step_response.as_f64(),
            amplitude_var: self.amplitude_var.as_f64(),
            degenerate: self.degenerate,
        }
    }
}

/// Scores that were computed before one or more detectors failed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialScores<T> {
    pub computed: BTreeMap<ScoreName, T>,
    pub failures: Vec<(ScoreName, SignalError)>,
}

impl<T> PartialScores<T> {
    pub fn first_error(&self) -> Option<&SignalError> {
        self.failures.first().map(|(_, e)| e)
    }
}

/// Runs every detector once.
///
/// Degenerate input short-circuits to [`ScoreVector::degenerate`]. If any
/// detector fails, the scores that did succeed are returned alongside the
/// failures.
pub fn score_all<T: Scalar>(
    s: &NormalizedSeries<T>,
    p: &DetectorParams,
) -> Result<ScoreVector<T>, PartialScores<T>> {
    if let Err(e) = p.validate() {
        return Err(PartialScores {
            computed: BTreeMap::new(),
            failures: vec![(ScoreName::Trend, e)],
        });
    }
    if s.is_degenerate() {
        return Ok(ScoreVector::degenerate());
    }

    let mut computed = BTreeMap::new();
    let mut failures = Vec::new();
    let mut record = |name: ScoreName, r: Result<T, SignalError>| match r {
        Ok(v) => {
            computed.insert(name, v);
        }
        Err(e) => failures.push((name, e)),
    };

    record(ScoreName::Trend, score_trend(s));
    record(ScoreName::Constancy, score_constancy(s, p));
    match score_curvature(s) {
        Ok(c) => {
            record(ScoreName::Curvature, Ok(c.gap));
            record(ScoreName::CurvatureSign, Ok(T::lit(f64::from(c.sign))));
        }
        Err(e) => record(ScoreName::Curvature, Err(e)),
    }
    record(ScoreName::LinearityMse, score_linearity(s));
    record(ScoreName::SmoothMse, score_smooth(s, p));
    record(ScoreName::NoiseMse, score_noise(s, p));
    record(ScoreName::Complexity, score_complexity(s, p));
    record(ScoreName::SpikePos, score_spikes(s, p, SpikeDirection::Up));
    record(ScoreName::SpikeNeg, score_spikes(s, p, SpikeDirection::Down));
    record(ScoreName::PeriodicityGap, score_periodicity(s).map(|r| r.score));
    record(ScoreName::SymmetryErr, score_symmetry(s, p));
    record(ScoreName::StepResponse, score_step(s, p));
    record(ScoreName::AmplitudeVar, score_amplitude(s, p));

    if !failures.is_empty() {
        return Err(PartialScores { computed, failures });
    }
    let get = |n: ScoreName| computed[&n];
    Ok(ScoreVector {
        trend: get(ScoreName::Trend),
        constancy: get(ScoreName::Constancy),
        curvature: get(ScoreName::Curvature),
        curvature_sign: get(ScoreName::CurvatureSign).as_f64() as i8,
        linearity_mse: get(ScoreName::LinearityMse),
        smooth_mse: get(ScoreName::SmoothMse),
        noise_mse: get(ScoreName::NoiseMse),
        complexity: get(ScoreName::Complexity),
        spike_pos: get(ScoreName::SpikePos),
        spike_neg: get(ScoreName::SpikeNeg),
        periodicity_gap: get(ScoreName::PeriodicityGap),
        symmetry_err: get(ScoreName::SymmetryErr),
        step_response: get(ScoreName::StepResponse),
        amplitude_var: get(ScoreName::AmplitudeVar),
        degenerate: false,
    })
}
