//! Base captions from class sets, and the optional rephrasing call.

mod rephrase;

pub use rephrase::{RephraseError, Rephraser, DEFAULT_IN_FLIGHT, ENDPOINT_ENV, MODEL_ENV, REPHRASE_PROMPT};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::annotator::{ClassSet, TimeSeriesClass};

/// Caption for an empty class set.
pub const EMPTY_CAPTION: &str = "The signal has no salient characteristics.";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaptionError {
    #[error("no template for class {0}")]
    MissingTemplate(TimeSeriesClass),
    #[error("template for {0} must be a non-empty sentence ending with a period")]
    BadTemplate(TimeSeriesClass),
    #[error("template for {0} duplicates another class's template")]
    DuplicateTemplate(TimeSeriesClass),
    #[error("sentence not produced by any template: '{0}'")]
    UnknownSentence(String),
}

fn default_template(class: TimeSeriesClass) -> &'static str {
    use TimeSeriesClass::*;
    match class {
        Rising => "The signal has a rising trend.",
        Falling => "The signal has a falling trend.",
        Constant => "The signal stays at a constant level.",
        Convex => "The signal has a convex shape.",
        Concave => "The signal has a concave shape.",
        Linear => "The signal has a linear shape.",
        Nonlinear => "The signal has a nonlinear shape.",
        Smooth => "The signal has a smooth shape.",
        Noisy => "The signal is noisy.",
        Simple => "The signal has a simple structure.",
        Complex => "The signal has a complex structure.",
        Spiky => "The signal contains sudden spikes in value.",
        Dropout => "The signal contains sudden drops in value.",
        Periodic => "The signal shows periodic behavior.",
        Aperiodic => "The signal shows aperiodic behavior.",
        Symmetry => "The signal has a symmetric shape.",
        Asymmetry => "The signal has an asymmetric shape.",
        Step => "The signal has step-like changes.",
        NoStep => "The signal has no step-like changes.",
        HighAmplitude => "The signal has a high amplitude.",
        LowAmplitude => "The signal has a low amplitude.",
    }
}

/// One base sentence per class.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionTemplateTable {
    templates: BTreeMap<TimeSeriesClass, String>,
}

impl Default for CaptionTemplateTable {
    fn default() -> Self {
        let templates = TimeSeriesClass::ALL
            .into_iter()
            .map(|c| (c, default_template(c).to_string()))
            .collect();
        Self { templates }
    }
}

impl CaptionTemplateTable {
    pub fn new(templates: BTreeMap<TimeSeriesClass, String>) -> Result<Self, CaptionError> {
        for class in TimeSeriesClass::ALL {
            let t = templates.get(&class).ok_or(CaptionError::MissingTemplate(class))?;
            let body = t.trim_end_matches('.');
            if body.trim().is_empty() || !t.ends_with('.') || body.contains('.') {
                return Err(CaptionError::BadTemplate(class));
            }
        }
        for (i, (&a, ta)) in templates.iter().enumerate() {
            if templates.values().skip(i + 1).any(|tb| tb == ta) {
                return Err(CaptionError::DuplicateTemplate(a));
            }
        }
        Ok(Self { templates })
    }

    pub fn template(&self, class: TimeSeriesClass) -> &str {
        &self.templates[&class]
    }

    /// Recovers the class set a base caption was built from.
    pub fn parse(&self, caption: &str) -> Result<ClassSet, CaptionError> {
        if caption == EMPTY_CAPTION {
            return Ok(ClassSet::new());
        }
        split_sentences(caption)
            .into_iter()
            .map(|sentence| {
                self.templates
                    .iter()
                    .find(|(_, t)| t.as_str() == sentence)
                    .map(|(&c, _)| c)
                    .ok_or_else(|| CaptionError::UnknownSentence(sentence.to_string()))
            })
            .collect()
    }
}

/// Splits text made of period-terminated sentences joined by single spaces.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'.' && (i + 1 == bytes.len() || bytes[i + 1] == b' ') {
            out.push(text[start..=i].trim());
            start = i + 1;
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

/// Joins the class templates in canonical class order.
pub fn base_caption(classes: &ClassSet, table: &CaptionTemplateTable) -> String {
    if classes.is_empty() {
        return EMPTY_CAPTION.to_string();
    }
    classes
        .iter()
        .map(|&c| table.template(c))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Base text plus the outcome of the optional rephrasing step.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionRecord {
    pub base_text: String,
    pub rephrased_text: Option<String>,
    pub rephrase_model: Option<String>,
}

impl CaptionRecord {
    pub fn base_only(base_text: String) -> Self {
        Self {
            base_text,
            rephrased_text: None,
            rephrase_model: None,
        }
    }

    /// The rephrased text when present, otherwise the base text.
    pub fn text(&self) -> &str {
        self.rephrased_text.as_deref().unwrap_or(&self.base_text)
    }
}
