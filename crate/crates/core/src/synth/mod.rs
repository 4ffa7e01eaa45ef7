//! Forward approach: build a series from a named base shape plus overlays,
//! together with the caption and class names describing it.

mod shapes;

pub use shapes::{OverlayKind, ParamSpec, Shape};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{moving_average, Series, SignalError};

/// Default generated length.
pub const DEFAULT_LENGTH: usize = 2048;

/// Probability that `sample_spec` adds any given overlay.
pub const OVERLAY_PROBABILITY: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub kind: OverlayKind,
    pub magnitude: f64,
}

/// Everything needed to regenerate one synthetic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub base_shape: Shape,
    #[serde(default)]
    pub shape_params: BTreeMap<String, f64>,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    pub length: usize,
    pub seed: u64,
}

impl SynthSpec {
    /// A clean shape with default parameters.
    pub fn new(base_shape: Shape, length: usize, seed: u64) -> Self {
        Self {
            base_shape,
            shape_params: BTreeMap::new(),
            overlays: Vec::new(),
            length,
            seed,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.shape_params.insert(name.to_string(), value);
        self
    }

    pub fn with_overlay(mut self, kind: OverlayKind, magnitude: f64) -> Self {
        self.overlays.push(Overlay { kind, magnitude });
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.length < Series::<f64>::MIN_LEN {
            return Err(SynthError::InvalidSpec(format!(
                "length {} is below the minimum of {}",
                self.length,
                Series::<f64>::MIN_LEN
            )));
        }
        let known = self.base_shape.params();
        for (name, &value) in &self.shape_params {
            if !known.iter().any(|p| p.name == name) {
                return Err(SynthError::InvalidSpec(format!(
                    "{} has no parameter '{name}'",
                    self.base_shape
                )));
            }
            if !value.is_finite() {
                return Err(SynthError::InvalidSpec(format!("parameter '{name}' is not finite")));
            }
        }
        if self.base_shape.is_periodic() && self.param("periods") < 1.0 {
            return Err(SynthError::InvalidSpec("periods must be at least 1".into()));
        }
        if matches!(self.base_shape, Shape::Gaussian | Shape::InvGaussian) && self.param("width") <= 0.0 {
            return Err(SynthError::InvalidSpec("width must be positive".into()));
        }
        for (i, o) in self.overlays.iter().enumerate() {
            let (lo, hi) = o.kind.magnitude_limits();
            if !(o.magnitude >= lo && o.magnitude <= hi) {
                return Err(SynthError::InvalidSpec(format!(
                    "{} magnitude {} outside [{lo}, {hi}]",
                    o.kind, o.magnitude
                )));
            }
            if self.overlays[..i].iter().any(|p| p.kind == o.kind) {
                return Err(SynthError::InvalidSpec(format!("overlay {} given twice", o.kind)));
            }
        }
        Ok(())
    }

    fn param(&self, name: &'static str) -> f64 {
        self.shape_params.get(name).copied().unwrap_or_else(|| {
            self.base_shape
                .params()
                .iter()
                .find(|p| p.name == name)
                .map_or(0.0, |p| p.default)
        })
    }

    /// Overlays in application order.
    fn ordered_overlays(&self) -> Vec<Overlay> {
        let mut v = self.overlays.clone();
        v.sort_by_key(|o| o.kind);
        v
    }
}

/// A generated series with its forward caption and class names.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSample {
    pub spec: SynthSpec,
    pub series: Series<f64>,
    pub caption: String,
    pub classes: Vec<String>,
}

/// Base shape on the unit time grid. Aperiodic shapes are rescaled to
/// `[0, 1]`; periodic shapes already live there analytically.
pub fn base_values(spec: &SynthSpec) -> Vec<f64> {
    let n = spec.length;
    let param = |name: &'static str| spec.param(name);
    let raw: Vec<f64> = (0..n)
        .map(|i| spec.base_shape.eval(i as f64 / (n - 1) as f64, &param))
        .collect();
    if spec.base_shape == Shape::Constant || spec.base_shape.is_periodic() {
        return raw;
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return vec![0.0; n];
    }
    raw.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Distinct positions in `[lo, hi)` at least `gap` apart, in ascending order.
fn spaced_positions(rng: &mut ChaCha8Rng, count: usize, lo: usize, hi: usize, gap: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::with_capacity(count);
    let mut attempts = 0;
    while picked.len() < count && attempts < 1000 {
        attempts += 1;
        let p = rng.random_range(lo..hi);
        if picked.iter().all(|&q| q.abs_diff(p) >= gap) {
            picked.push(p);
        }
    }
    picked.sort_unstable();
    picked
}

fn apply_overlay(values: &mut [f64], o: Overlay, rng: &mut ChaCha8Rng) -> Result<(), SynthError> {
    let n = values.len();
    match o.kind {
        OverlayKind::Steppy => {
            let count = rng.random_range(1..=4);
            let mut sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            for p in spaced_positions(rng, count, n / 10, n - n / 10, n / 8) {
                for v in &mut values[p..] {
                    *v += sign * o.magnitude;
                }
                sign = -sign;
            }
        }
        OverlayKind::Noisy => {
            if o.magnitude > 0.0 {
                let noise = Uniform::new_inclusive(-o.magnitude, o.magnitude).expect("finite bounds");
                for v in values.iter_mut() {
                    *v += noise.sample(rng);
                }
            }
        }
        OverlayKind::Smooth => {
            let mut w = ((o.magnitude * n as f64).round() as usize).max(3);
            if w % 2 == 0 {
                w += 1;
            }
            let smoothed = moving_average(values, w.min(n - (1 - n % 2)))?;
            values.copy_from_slice(&smoothed);
        }
        OverlayKind::PosSpiky | OverlayKind::NegSpiky | OverlayKind::PosNegSpiky => {
            let edge = (n / 50).max(1);
            let count = rng.random_range(1..=5);
            let positions = spaced_positions(rng, count, edge, n - edge, 3);
            for (i, p) in positions.into_iter().enumerate() {
                let sign = match o.kind {
                    OverlayKind::PosSpiky => 1.0,
                    OverlayKind::NegSpiky => -1.0,
                    _ => match i {
                        0 => 1.0,
                        1 => -1.0,
                        _ if rng.random_bool(0.5) => 1.0,
                        _ => -1.0,
                    },
                };
                values[p] += sign * o.magnitude;
            }
        }
    }
    Ok(())
}

/// Forward caption: the shape sentence followed by one sentence per overlay.
pub fn forward_caption(spec: &SynthSpec) -> String {
    std::iter::once(spec.base_shape.sentence())
        .chain(spec.ordered_overlays().iter().map(|o| o.kind.sentence()))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn forward_classes(spec: &SynthSpec) -> Vec<String> {
    std::iter::once(spec.base_shape.name())
        .chain(spec.ordered_overlays().iter().map(|o| o.kind.name()))
        .map(str::to_string)
        .collect()
}

/// Deterministic for a given spec, seed included.
pub fn generate(spec: &SynthSpec) -> Result<SynthSample, SynthError> {
    spec.validate()?;
    let mut values = base_values(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for o in spec.ordered_overlays() {
        apply_overlay(&mut values, o, &mut rng)?;
    }
    Ok(SynthSample {
        spec: spec.clone(),
        series: Series::new(values)?,
        caption: forward_caption(spec),
        classes: forward_classes(spec),
    })
}

/// Draws a random spec. `shapes` restricts the base shape; `None` allows all.
pub fn sample_spec(seed: u64, length: usize, shapes: Option<&[Shape]>) -> Result<SynthSpec, SynthError> {
    let pool: &[Shape] = shapes.unwrap_or(&Shape::ALL);
    if pool.is_empty() {
        return Err(SynthError::InvalidArgument("empty shape constraint".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = pool[rng.random_range(0..pool.len())];
    let mut spec = SynthSpec::new(shape, length, rng.random());
    for p in shape.params() {
        spec.shape_params
            .insert(p.name.to_string(), rng.random_range(p.range.0..p.range.1));
    }
    for kind in OverlayKind::ALL {
        if rng.random_bool(OVERLAY_PROBABILITY) {
            let (lo, hi) = kind.magnitude_range();
            spec.overlays.push(Overlay {
                kind,
                magnitude: rng.random_range(lo..hi),
            });
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// Independent per-index seed derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
