use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnnotateError, TimeSeriesClass};
use crate::detectors::ScoreName;

const DEFAULT_THRESHOLDS: &str = include_str!("../../config/thresholds.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Greater,
    Less,
}

/// Decision rule for one class: fires when the named score is strictly
/// beyond the cutoff in the given direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdRule {
    pub score: ScoreName,
    pub direction: Direction,
    pub cutoff: f64,
}

impl ThresholdRule {
    /// NaN never fires; infinite scores compare as usual.
    pub fn fires(&self, value: f64) -> bool {
        match self.direction {
            Direction::Greater => value > self.cutoff,
            Direction::Less => value < self.cutoff,
        }
    }

    /// Whether some score value could satisfy both rules at once.
    fn can_overlap(&self, other: &ThresholdRule) -> bool {
        if self.score != other.score || self.direction == other.direction {
            return true;
        }
        let (greater, less) = match self.direction {
            Direction::Greater => (self, other),
            Direction::Less => (other, self),
        };
        greater.cutoff < less.cutoff
    }
}

/// One validated rule per class. Paired classes can never both fire.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ThresholdConfig {
    rules: BTreeMap<TimeSeriesClass, ThresholdRule>,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self::from_json_str(DEFAULT_THRESHOLDS).expect("embedded threshold config is valid")
    }
}

impl ThresholdConfig {
    pub fn from_rules(rules: BTreeMap<TimeSeriesClass, ThresholdRule>) -> Result<Self, AnnotateError> {
        let invalid = |class: TimeSeriesClass, reason: String| AnnotateError::InvalidConfig {
            class: Some(class.name().to_string()),
            reason,
        };
        for class in TimeSeriesClass::ALL {
            let rule = rules
                .get(&class)
                .ok_or_else(|| invalid(class, "no rule for class".into()))?;
            if rule.cutoff.is_nan() {
                return Err(invalid(class, "cutoff is NaN".into()));
            }
        }
        for (a, b) in TimeSeriesClass::EXCLUSIVE_PAIRS {
            if rules[&a].can_overlap(&rules[&b]) {
                return Err(invalid(
                    b,
                    format!(
                        "rules for {a} and {b} can fire together; paired rules need the same \
                         score, opposite directions and non-overlapping cutoffs"
                    ),
                ));
            }
        }
        Ok(Self { rules })
    }

    pub fn from_json_str(text: &str) -> Result<Self, AnnotateError> {
        let config_err = |reason: String| AnnotateError::InvalidConfig { class: None, reason };
        if text.trim().is_empty() {
            return Err(config_err("empty threshold config".into()));
        }
        let raw: BTreeMap<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let mut rules = BTreeMap::new();
        for (name, value) in raw {
            let class: TimeSeriesClass = name.parse().map_err(|e: String| AnnotateError::InvalidConfig {
                class: Some(name.clone()),
                reason: e,
            })?;
            let rule: ThresholdRule =
                serde_json::from_value(value).map_err(|e| AnnotateError::InvalidConfig {
                    class: Some(name.clone()),
                    reason: e.to_string(),
                })?;
            rules.insert(class, rule);
        }
        Self::from_rules(rules)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn rule(&self, class: TimeSeriesClass) -> &ThresholdRule {
        &self.rules[&class]
    }

    pub fn rules(&self) -> impl Iterator<Item = (TimeSeriesClass, &ThresholdRule)> {
        self.rules.iter().map(|(&c, r)| (c, r))
    }
}

/// Reads and validates a threshold file; `None` gives the embedded defaults.
pub fn load_config(path: Option<&Path>) -> Result<ThresholdConfig, AnnotateError> {
    match path {
        None => Ok(ThresholdConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| AnnotateError::InvalidConfig {
                class: None,
                reason: format!("{}: {e}", p.display()),
            })?;
            ThresholdConfig::from_json_str(&text)
        }
    }
}
