//! Backward approach: thresholds turn detector scores into descriptive
//! classes.

mod class;
mod config;

pub use class::{ClassSet, TimeSeriesClass};
pub use config::{load_config, Direction, ThresholdConfig, ThresholdRule};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::detectors::{score_all, DetectorParams, ScoreVector};
use crate::scalar::Scalar;
use crate::signal::{Series, SignalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotateError {
    #[error("invalid threshold config{}: {reason}", class.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    InvalidConfig { class: Option<String>, reason: String },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Classes assigned to one series, with the scores they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation<T> {
    pub id: String,
    pub classes: ClassSet,
    pub scores: ScoreVector<T>,
    pub params_digest: String,
}

/// Applies every class rule, then the Constant dominance filter.
pub fn assign_classes<T: Scalar>(scores: &ScoreVector<T>, cfg: &ThresholdConfig) -> ClassSet {
    let mut classes: ClassSet = cfg
        .rules()
        .filter(|(_, rule)| rule.fires(scores.get(rule.score).as_f64()))
        .map(|(class, _)| class)
        .collect();
    if classes.contains(&TimeSeriesClass::Constant) {
        for c in TimeSeriesClass::CONSTANT_EXCLUDES {
            classes.remove(&c);
        }
    }
    classes
}

/// Stable hex digest of the detector parameters and threshold config.
pub fn params_digest(p: &DetectorParams, cfg: &ThresholdConfig) -> String {
    #[derive(Serialize)]
    struct Digested<'a> {
        params: &'a DetectorParams,
        thresholds: &'a ThresholdConfig,
    }
    let canonical = serde_json::to_vec(&Digested {
        params: p,
        thresholds: cfg,
    })
    .expect("config serializes");
    let hash = Sha256::digest(&canonical);
    hex::encode(&hash[..8])
}

/// Detector parameters and thresholds bundled with their digest.
#[derive(Debug, Clone)]
pub struct Annotator {
    params: DetectorParams,
    config: ThresholdConfig,
    digest: String,
}

impl Default for Annotator {
    fn default() -> Self {
        Self::new(DetectorParams::default(), ThresholdConfig::default())
            .expect("default detector params are valid")
    }
}

impl Annotator {
    pub fn new(params: DetectorParams, config: ThresholdConfig) -> Result<Self, AnnotateError> {
        params.validate()?;
        let digest = params_digest(&params, &config);
        Ok(Self {
            params,
            config,
            digest,
        })
    }

    pub fn params(&self) -> &DetectorParams {
        &self.params
    }

    pub fn config(&self) -> &ThresholdConfig {
        &self.config
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Normalize, score, threshold.
    pub fn annotate<T: Scalar>(&self, id: &str, s: &Series<T>) -> Result<Annotation<T>, AnnotateError> {
        let normalized = s.normalize();
        let scores = score_all(&normalized, &self.params).map_err(|partial| {
            partial
                .first_error()
                .cloned()
                .unwrap_or_else(|| SignalError::InvalidArgument("detector failure".into()))
        })?;
        let classes = assign_classes(&scores, &self.config);
        Ok(Annotation {
            id: id.to_string(),
            classes,
            scores,
            params_digest: self.digest.clone(),
        })
    }

    /// Validates raw samples as a [`Series`] first.
    pub fn annotate_values<T: Scalar>(&self, id: &str, values: &[T]) -> Result<Annotation<T>, AnnotateError> {
        let s = Series::new(values.to_vec())?;
        self.annotate(id, &s)
    }
}

pub fn annotate<T: Scalar>(
    id: &str,
    s: &Series<T>,
    p: &DetectorParams,
    cfg: &ThresholdConfig,
) -> Result<Annotation<T>, AnnotateError> {
    Annotator::new(p.clone(), cfg.clone())?.annotate(id, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use TimeSeriesClass::*;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| i as f64 / (n - 1) as f64)
    }

    #[test]
    fn rising_rule_fires() {
        let mut scores = ScoreVector::<f64>::degenerate();
        scores.degenerate = false;
        scores.constancy = 0.3;
        scores.trend = 0.95;
        let classes = assign_classes(&scores, &ThresholdConfig::default());
        assert!(classes.contains(&Rising));
        assert!(!classes.contains(&Falling));
    }

    #[test]
    fn degenerate_vector_classes() {
        let classes = assign_classes(&ScoreVector::<f64>::degenerate(), &ThresholdConfig::default());
        let expected: ClassSet = [Constant, Linear, Smooth, Simple, Aperiodic, Symmetry, NoStep, LowAmplitude]
            .into_iter()
            .collect();
        assert_eq!(classes, expected);
    }

    #[test]
    fn constant_dominates() {
        let mut scores = ScoreVector::<f64>::degenerate();
        scores.trend = 0.9;
        scores.periodicity_gap = -0.5;
        scores.curvature = 0.2;
        scores.curvature_sign = 1;
        let classes = assign_classes(&scores, &ThresholdConfig::default());
        assert!(classes.contains(&Constant));
        for c in TimeSeriesClass::CONSTANT_EXCLUDES {
            assert!(!classes.contains(&c), "{c} survived");
        }
    }

    #[test]
    fn ramp_golden_set() {
        let ramp: Vec<f64> = grid(2048).collect();
        let ann = Annotator::default().annotate_values("ramp", &ramp).unwrap();
        for c in [Rising, Linear, Smooth, Simple, NoStep, LowAmplitude] {
            assert!(ann.classes.contains(&c), "missing {c}: {:?}", ann.classes);
        }
        assert_eq!(ann.scores.trend, 1.0);
        assert!(ann.scores.linearity_mse < 1e-20);
        assert!((ann.scores.step_response - 0.25).abs() < 1e-3);
    }

    #[test]
    fn sine_is_periodic_and_step_is_step() {
        let a = Annotator::default();
        let sine: Vec<f64> = grid(2048).map(|t| (2.0 * PI * 4.0 * t).sin()).collect();
        assert!(a.annotate_values("sine", &sine).unwrap().classes.contains(&Periodic));
        let step: Vec<f64> = (0..2048).map(|i| if i < 1024 { 0.0 } else { 1.0 }).collect();
        assert!(a.annotate_values("step", &step).unwrap().classes.contains(&Step));
    }

    #[test]
    fn short_series_too_short() {
        let err = Annotator::default().annotate_values("x", &[0.0f64; 8]).unwrap_err();
        assert!(matches!(err, AnnotateError::Signal(SignalError::TooShort(_))));
    }

    #[test]
    fn digest_depends_on_config() {
        let p = DetectorParams::default();
        let cfg = ThresholdConfig::default();
        let d = params_digest(&p, &cfg);
        assert_eq!(d.len(), 16);
        assert_eq!(d, params_digest(&p, &cfg));
        let p2 = DetectorParams {
            spike_sigma: 2.5,
            ..p
        };
        assert_ne!(d, params_digest(&p2, &cfg));
    }

    fn score_vector() -> impl Strategy<Value = ScoreVector<f64>> {
        let any_score = prop_oneof![
            -2.0..2.0f64,
            -0.05..0.05f64,
            Just(f64::INFINITY),
            Just(0.0),
        ];
        (proptest::collection::vec(any_score, 13), -1i8..=1).prop_map(|(v, sign)| ScoreVector {
            trend: v[0],
            constancy: v[1],
            curvature: v[2].abs(),
            curvature_sign: sign,
            linearity_mse: v[3],
            smooth_mse: v[4],
            noise_mse: v[5],
            complexity: v[6],
            spike_pos: v[7],
            spike_neg: v[8],
            periodicity_gap: v[9],
            symmetry_err: v[10],
            step_response: v[11],
            amplitude_var: v[12],
            degenerate: false,
        })
    }

    proptest! {
        #[test]
        fn at_most_one_class_per_pair(scores in score_vector()) {
            let classes = assign_classes(&scores, &ThresholdConfig::default());
            for (a, b) in TimeSeriesClass::EXCLUSIVE_PAIRS {
                prop_assert!(!(classes.contains(&a) && classes.contains(&b)), "{a} and {b}");
            }
        }
    }
}
