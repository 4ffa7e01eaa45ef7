use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The descriptive classes assignable by the backward (score + threshold)
/// approach. `Ord` follows the canonical listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeSeriesClass {
    Rising,
    Falling,
    Constant,
    Convex,
    Concave,
    Linear,
    Nonlinear,
    Smooth,
    Noisy,
    Simple,
    Complex,
    Spiky,
    Dropout,
    Periodic,
    Aperiodic,
    Symmetry,
    Asymmetry,
    Step,
    NoStep,
    HighAmplitude,
    LowAmplitude,
}

pub type ClassSet = BTreeSet<TimeSeriesClass>;

impl TimeSeriesClass {
    pub const ALL: [TimeSeriesClass; 21] = [
        TimeSeriesClass::Rising,
        TimeSeriesClass::Falling,
        TimeSeriesClass::Constant,
        TimeSeriesClass::Convex,
        TimeSeriesClass::Concave,
        TimeSeriesClass::Linear,
        TimeSeriesClass::Nonlinear,
        TimeSeriesClass::Smooth,
        TimeSeriesClass::Noisy,
        TimeSeriesClass::Simple,
        TimeSeriesClass::Complex,
        TimeSeriesClass::Spiky,
        TimeSeriesClass::Dropout,
        TimeSeriesClass::Periodic,
        TimeSeriesClass::Aperiodic,
        TimeSeriesClass::Symmetry,
        TimeSeriesClass::Asymmetry,
        TimeSeriesClass::Step,
        TimeSeriesClass::NoStep,
        TimeSeriesClass::HighAmplitude,
        TimeSeriesClass::LowAmplitude,
    ];

    /// Pairs of classes of which at most one may be assigned.
    pub const EXCLUSIVE_PAIRS: [(TimeSeriesClass, TimeSeriesClass); 8] = [
        (TimeSeriesClass::Rising, TimeSeriesClass::Falling),
        (TimeSeriesClass::Convex, TimeSeriesClass::Concave),
        (TimeSeriesClass::Linear, TimeSeriesClass::Nonlinear),
        (TimeSeriesClass::Simple, TimeSeriesClass::Complex),
        (TimeSeriesClass::Periodic, TimeSeriesClass::Aperiodic),
        (TimeSeriesClass::Symmetry, TimeSeriesClass::Asymmetry),
        (TimeSeriesClass::Step, TimeSeriesClass::NoStep),
        (TimeSeriesClass::HighAmplitude, TimeSeriesClass::LowAmplitude),
    ];

    /// Classes removed whenever `Constant` is assigned.
    pub const CONSTANT_EXCLUDES: [TimeSeriesClass; 6] = [
        TimeSeriesClass::Rising,
        TimeSeriesClass::Falling,
        TimeSeriesClass::Convex,
        TimeSeriesClass::Concave,
        TimeSeriesClass::Nonlinear,
        TimeSeriesClass::Periodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TimeSeriesClass::Rising => "Rising",
            TimeSeriesClass::Falling => "Falling",
            TimeSeriesClass::Constant => "Constant",
            TimeSeriesClass::Convex => "Convex",
            TimeSeriesClass::Concave => "Concave",
            TimeSeriesClass::Linear => "Linear",
            TimeSeriesClass::Nonlinear => "Nonlinear",
            TimeSeriesClass::Smooth => "Smooth",
            TimeSeriesClass::Noisy => "Noisy",
            TimeSeriesClass::Simple => "Simple",
            TimeSeriesClass::Complex => "Complex",
            TimeSeriesClass::Spiky => "Spiky",
            TimeSeriesClass::Dropout => "Dropout",
            TimeSeriesClass::Periodic => "Periodic",
            TimeSeriesClass::Aperiodic => "Aperiodic",
            TimeSeriesClass::Symmetry => "Symmetry",
            TimeSeriesClass::Asymmetry => "Asymmetry",
            TimeSeriesClass::Step => "Step",
            TimeSeriesClass::NoStep => "NoStep",
            TimeSeriesClass::HighAmplitude => "HighAmplitude",
            TimeSeriesClass::LowAmplitude => "LowAmplitude",
        }
    }

    /// The other member of this class's exclusivity pair, if any.
    pub fn partner(self) -> Option<TimeSeriesClass> {
        Self::EXCLUSIVE_PAIRS.iter().find_map(|&(a, b)| {
            if a == self {
                Some(b)
            } else if b == self {
                Some(a)
            } else {
                None
            }
        })
    }
}

impl fmt::Display for TimeSeriesClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TimeSeriesClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimeSeriesClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown time-series class '{s}'"))
    }
}

impl Serialize for TimeSeriesClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TimeSeriesClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_matches_listing() {
        let mut sorted = TimeSeriesClass::ALL;
        sorted.sort();
        assert_eq!(sorted, TimeSeriesClass::ALL);
        assert_eq!(TimeSeriesClass::ALL[0], TimeSeriesClass::Rising);
        assert_eq!(TimeSeriesClass::ALL[20], TimeSeriesClass::LowAmplitude);
    }

    #[test]
    fn names_parse_back() {
        for c in TimeSeriesClass::ALL {
            assert_eq!(c.name().parse::<TimeSeriesClass>().unwrap(), c);
        }
        assert!("Asymemtry".parse::<TimeSeriesClass>().is_err());
    }

    #[test]
    fn partners_are_symmetric() {
        for c in TimeSeriesClass::ALL {
            if let Some(p) = c.partner() {
                assert_eq!(p.partner(), Some(c));
            }
        }
        assert_eq!(TimeSeriesClass::Constant.partner(), None);
        assert_eq!(TimeSeriesClass::Spiky.partner(), None);
    }
}
