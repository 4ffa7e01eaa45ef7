use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SynthError;

/// Named base functions for the forward approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Constant,
    LinearIncrease,
    LinearDecrease,
    Concave,
    Convex,
    ExpGrowth,
    ExpDecay,
    InvExpGrowth,
    InvExpDecay,
    Sigmoid,
    InvSigmoid,
    Cubic,
    NegCubic,
    Gaussian,
    InvGaussian,
    Sinusoidal,
    Square,
    Sawtooth,
    ReverseSawtooth,
    Triangle,
}

/// A named shape parameter with its default and sampling range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub range: (f64, f64),
}

const LEVEL: ParamSpec = ParamSpec { name: "level", default: 0.5, range: (0.0, 1.0) };
const CURVE_CENTER: ParamSpec = ParamSpec { name: "center", default: 0.5, range: (0.25, 0.75) };
const RATE: ParamSpec = ParamSpec { name: "rate", default: 4.0, range: (2.0, 6.0) };
const STEEPNESS: ParamSpec = ParamSpec { name: "steepness", default: 10.0, range: (5.0, 20.0) };
const MID_CENTER: ParamSpec = ParamSpec { name: "center", default: 0.5, range: (0.3, 0.7) };
const BUMP_CENTER: ParamSpec = ParamSpec { name: "center", default: 0.5, range: (0.2, 0.8) };
const WIDTH: ParamSpec = ParamSpec { name: "width", default: 0.1, range: (0.05, 0.3) };
const PERIODS: ParamSpec = ParamSpec { name: "periods", default: 4.0, range: (1.0, 8.0) };
const PHASE: ParamSpec = ParamSpec { name: "phase", default: 0.0, range: (0.0, 1.0) };

impl Shape {
    pub const ALL: [Shape; 20] = [
        Shape::Constant,
        Shape::LinearIncrease,
        Shape::LinearDecrease,
        Shape::Concave,
        Shape::Convex,
        Shape::ExpGrowth,
        Shape::ExpDecay,
        Shape::InvExpGrowth,
        Shape::InvExpDecay,
        Shape::Sigmoid,
        Shape::InvSigmoid,
        Shape::Cubic,
        Shape::NegCubic,
        Shape::Gaussian,
        Shape::InvGaussian,
        Shape::Sinusoidal,
        Shape::Square,
        Shape::Sawtooth,
        Shape::ReverseSawtooth,
        Shape::Triangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Constant => "Constant",
            Shape::LinearIncrease => "LinearIncrease",
            Shape::LinearDecrease => "LinearDecrease",
            Shape::Concave => "Concave",
            Shape::Convex => "Convex",
            Shape::ExpGrowth => "ExpGrowth",
            Shape::ExpDecay => "ExpDecay",
            Shape::InvExpGrowth => "InvExpGrowth",
            Shape::InvExpDecay => "InvExpDecay",
            Shape::Sigmoid => "Sigmoid",
            Shape::InvSigmoid => "InvSigmoid",
            Shape::Cubic => "Cubic",
            Shape::NegCubic => "NegCubic",
            Shape::Gaussian => "Gaussian",
            Shape::InvGaussian => "InvGaussian",
            Shape::Sinusoidal => "Sinusoidal",
            Shape::Square => "Square",
            Shape::Sawtooth => "Sawtooth",
            Shape::ReverseSawtooth => "ReverseSawtooth",
            Shape::Triangle => "Triangle",
        }
    }

    pub fn sentence(self) -> &'static str {
        match self {
            Shape::Constant => "The signal is constant.",
            Shape::LinearIncrease => "The signal increases linearly.",
            Shape::LinearDecrease => "The signal decreases linearly.",
            Shape::Concave => "The signal follows a concave curve.",
            Shape::Convex => "The signal follows a convex curve.",
            Shape::ExpGrowth => "The signal grows exponentially.",
            Shape::ExpDecay => "The signal decays exponentially.",
            Shape::InvExpGrowth => "The signal follows an inverted exponential growth curve.",
            Shape::InvExpDecay => "The signal follows an inverted exponential decay curve.",
            Shape::Sigmoid => "The signal follows a sigmoid curve.",
            Shape::InvSigmoid => "The signal follows an inverted sigmoid curve.",
            Shape::Cubic => "The signal follows a cubic function.",
            Shape::NegCubic => "The signal follows a negative cubic function.",
            Shape::Gaussian => "The signal follows a Gaussian curve.",
            Shape::InvGaussian => "The signal follows an inverted Gaussian curve.",
            Shape::Sinusoidal => "The signal is a sinusoidal wave.",
            Shape::Square => "The signal is a square wave.",
            Shape::Sawtooth => "The signal is a sawtooth wave.",
            Shape::ReverseSawtooth => "The signal is a reverse sawtooth wave.",
            Shape::Triangle => "The signal is a triangle wave.",
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(
            self,
            Shape::Sinusoidal | Shape::Square | Shape::Sawtooth | Shape::ReverseSawtooth | Shape::Triangle
        )
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Shape::Constant => &[LEVEL],
            Shape::LinearIncrease | Shape::LinearDecrease => &[],
            Shape::Concave | Shape::Convex => &[CURVE_CENTER],
            Shape::ExpGrowth | Shape::ExpDecay | Shape::InvExpGrowth | Shape::InvExpDecay => &[RATE],
            Shape::Sigmoid | Shape::InvSigmoid => &[STEEPNESS, MID_CENTER],
            Shape::Cubic | Shape::NegCubic => &[MID_CENTER],
            Shape::Gaussian | Shape::InvGaussian => &[WIDTH, BUMP_CENTER],
            Shape::Sinusoidal | Shape::Square | Shape::Sawtooth | Shape::ReverseSawtooth | Shape::Triangle => {
                &[PERIODS, PHASE]
            }
        }
    }

    /// Raw (unnormalized) value at `t` in `[0, 1]`. `param` looks up a
    /// parameter by name, falling back to its default.
    pub(crate) fn eval(self, t: f64, param: &dyn Fn(&'static str) -> f64) -> f64 {
        let cycle = || {
            let x = param("periods") * t + param("phase");
            x - x.floor()
        };
        match self {
            Shape::Constant => param("level"),
            Shape::LinearIncrease => t,
            Shape::LinearDecrease => 1.0 - t,
            Shape::Convex => (t - param("center")).powi(2),
            Shape::Concave => -(t - param("center")).powi(2),
            Shape::ExpGrowth => (param("rate") * t).exp(),
            Shape::ExpDecay => (-param("rate") * t).exp(),
            Shape::InvExpGrowth => -(param("rate") * t).exp(),
            Shape::InvExpDecay => -(-param("rate") * t).exp(),
            Shape::Sigmoid => 1.0 / (1.0 + (-param("steepness") * (t - param("center"))).exp()),
            Shape::InvSigmoid => -1.0 / (1.0 + (-param("steepness") * (t - param("center"))).exp()),
            Shape::Cubic => (t - param("center")).powi(3),
            Shape::NegCubic => -(t - param("center")).powi(3),
            Shape::Gaussian => (-(t - param("center")).powi(2) / (2.0 * param("width").powi(2))).exp(),
            Shape::InvGaussian => -(-(t - param("center")).powi(2) / (2.0 * param("width").powi(2))).exp(),
            Shape::Sinusoidal => 0.5 + 0.5 * (2.0 * PI * (param("periods") * t + param("phase"))).sin(),
            Shape::Square => {
                if cycle() < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Sawtooth => cycle(),
            Shape::ReverseSawtooth => 1.0 - cycle(),
            Shape::Triangle => 1.0 - (2.0 * cycle() - 1.0).abs(),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Shape::ALL
            .into_iter()
            .find(|sh| sh.name() == s)
            .ok_or_else(|| SynthError::InvalidSpec(format!("unknown shape '{s}'")))
    }
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Additive modifications applied on top of a normalized base shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OverlayKind {
    Steppy,
    Noisy,
    Smooth,
    PosSpiky,
    NegSpiky,
    PosNegSpiky,
}

impl OverlayKind {
    /// Application (and caption) order.
    pub const ALL: [OverlayKind; 6] = [
        OverlayKind::Steppy,
        OverlayKind::Noisy,
        OverlayKind::Smooth,
        OverlayKind::PosSpiky,
        OverlayKind::NegSpiky,
        OverlayKind::PosNegSpiky,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OverlayKind::Steppy => "Steppy",
            OverlayKind::Noisy => "Noisy",
            OverlayKind::Smooth => "Smooth",
            OverlayKind::PosSpiky => "PosSpiky",
            OverlayKind::NegSpiky => "NegSpiky",
            OverlayKind::PosNegSpiky => "PosNegSpiky",
        }
    }

    pub fn sentence(self) -> &'static str {
        match self {
            OverlayKind::Steppy => "The signal changes in steps.",
            OverlayKind::Noisy => "The signal contains noise.",
            OverlayKind::Smooth => "The signal is smoothed.",
            OverlayKind::PosSpiky => "The signal contains upward spikes.",
            OverlayKind::NegSpiky => "The signal contains downward spikes.",
            OverlayKind::PosNegSpiky => "The signal contains upward and downward spikes.",
        }
    }

    /// Sampling range for the overlay magnitude. Noise is the half-width of
    /// uniform noise, Smooth a window fraction of the length, spikes and steps
    /// heights relative to the unit base range.
    pub fn magnitude_range(self) -> (f64, f64) {
        match self {
            OverlayKind::Steppy => (0.5, 1.5),
            OverlayKind::Noisy => (0.25, 0.5),
            OverlayKind::Smooth => (0.01, 0.05),
            OverlayKind::PosSpiky | OverlayKind::NegSpiky | OverlayKind::PosNegSpiky => (1.0, 3.0),
        }
    }

    pub(crate) fn magnitude_limits(self) -> (f64, f64) {
        match self {
            OverlayKind::Noisy => (0.0, 0.5),
            OverlayKind::Smooth => (0.0, 0.2),
            _ => (0.0, 10.0),
        }
    }
}

impl fmt::Display for OverlayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OverlayKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OverlayKind::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| SynthError::InvalidSpec(format!("unknown overlay '{s}'")))
    }
}

impl Serialize for OverlayKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for OverlayKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
