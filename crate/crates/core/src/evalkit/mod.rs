//! Caption evaluation (corpus BLEU, ROUGE-L) and the nearest-neighbour
//! retrieval baseline.

mod metrics;

pub use metrics::{bleu_n, corpus_bleu, rouge_l, rouge_l_multi, tokenize, ROUGE_BETA};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::pipeline::{read_jsonl_file, DatasetRecord, PipelineError};
use crate::signal::{Series, SignalError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("training index is empty")]
    EmptyIndex,
    #[error("vector length {got} does not match index length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("record '{0}' has no values")]
    MissingValues(String),
    #[error("line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
    #[error("ids not aligned; missing from references: {missing_in_references:?}; missing from candidates: {missing_in_candidates:?}")]
    Alignment {
        missing_in_references: Vec<String>,
        missing_in_candidates: Vec<String>,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Corpus-level scores. Keys for model-based metrics are reserved as `null`
/// so externally computed values can be merged in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub bleu_3: f64,
    pub bleu_4: f64,
    pub rouge_l: f64,
    pub meteor: Option<f64>,
    pub cider: Option<f64>,
    pub spice: Option<f64>,
    pub bertscore: Option<f64>,
    pub sentence_bert: Option<f64>,
    pub samples: usize,
    pub bleu_aggregation: &'static str,
    pub rouge_aggregation: &'static str,
}

/// An `(id, caption)` pair read from a JSONL file.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionEntry {
    pub id: String,
    pub caption: String,
}

/// Reads `id` plus the first present of `caption`, `caption_rephrased`,
/// `caption_base` from each line.
pub fn load_captions(path: &Path) -> Result<Vec<CaptionEntry>, EvalError> {
    let rows: Vec<Value> = read_jsonl_file(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let bad = |reason: &str| EvalError::BadRecord {
                line: i + 1,
                reason: reason.to_string(),
            };
            let id = match row.get("id") {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Number(n)) => n.to_string(),
                _ => return Err(bad("missing string id")),
            };
            let caption = ["caption", "caption_rephrased", "caption_base"]
                .iter()
                .find_map(|k| row.get(*k).and_then(Value::as_str))
                .ok_or_else(|| bad("no caption field"))?;
            Ok(CaptionEntry {
                id,
                caption: caption.to_string(),
            })
        })
        .collect()
}

/// Scores candidates against references matched by id. A reference id may
/// repeat to supply several references; candidate ids must be unique.
pub fn evaluate_corpus(candidates: &[CaptionEntry], references: &[CaptionEntry]) -> Result<MetricReport, EvalError> {
    let mut refs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in references {
        refs.entry(&r.id).or_default().push(&r.caption);
    }
    let cand_ids: BTreeSet<&str> = candidates.iter().map(|c| c.id.as_str()).collect();
    let mut missing_in_references: Vec<String> = candidates
        .iter()
        .filter(|c| !refs.contains_key(c.id.as_str()))
        .map(|c| c.id.clone())
        .collect();
    let mut seen = BTreeSet::new();
    for c in candidates {
        if !seen.insert(c.id.as_str()) {
            missing_in_references.push(format!("{} (duplicate candidate)", c.id));
        }
    }
    let missing_in_candidates: Vec<String> = refs
        .keys()
        .filter(|id| !cand_ids.contains(*id))
        .map(|id| id.to_string())
        .collect();
    if !missing_in_references.is_empty() || !missing_in_candidates.is_empty() {
        return Err(EvalError::Alignment {
            missing_in_references,
            missing_in_candidates,
        });
    }

    let pairs: Vec<(&str, Vec<&str>)> = candidates
        .iter()
        .map(|c| (c.caption.as_str(), refs[c.id.as_str()].clone()))
        .collect();
    let rouge = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().map(|(c, r)| rouge_l_multi(c, r)).sum::<f64>() / pairs.len() as f64
    };
    Ok(MetricReport {
        bleu_3: corpus_bleu(&pairs, 3),
        bleu_4: corpus_bleu(&pairs, 4),
        rouge_l: rouge,
        meteor: None,
        cider: None,
        spice: None,
        bertscore: None,
        sentence_bert: None,
        samples: pairs.len(),
        bleu_aggregation: "corpus",
        rouge_aggregation: "mean",
    })
}

/// Training vectors and captions for retrieval.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainIndex {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    captions: Vec<String>,
}

impl TrainIndex {
    pub fn new(entries: Vec<(String, Vec<f64>, String)>) -> Result<Self, EvalError> {
        let len = entries.first().map(|e| e.1.len());
        let mut index = TrainIndex {
            ids: Vec::with_capacity(entries.len()),
            vectors: Vec::with_capacity(entries.len()),
            captions: Vec::with_capacity(entries.len()),
        };
        for (id, v, caption) in entries {
            if Some(v.len()) != len {
                return Err(EvalError::LengthMismatch {
                    expected: len.unwrap_or(0),
                    got: v.len(),
                });
            }
            index.ids.push(id);
            index.vectors.push(v);
            index.captions.push(caption);
        }
        Ok(index)
    }

    /// Uses stored values and the rephrased caption when present.
    pub fn from_records(records: &[DatasetRecord]) -> Result<Self, EvalError> {
        let entries = records
            .iter()
            .map(|r| {
                let values = r.values.clone().ok_or_else(|| EvalError::MissingValues(r.id.clone()))?;
                let caption = r.caption_rephrased.clone().unwrap_or_else(|| r.caption_base.clone());
                Ok((r.id.clone(), values, caption))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::from_records(&read_jsonl_file::<DatasetRecord>(path)?)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Length of every stored vector; `None` when empty.
    pub fn vector_len(&self) -> Option<usize> {
        self.vectors.first().map(Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub position: usize,
    pub id: String,
    pub caption: String,
    pub mse: f64,
}

/// Resamples then min-max normalizes a query to the index vector length.
pub fn prepare_query(values: &[f64], target_len: usize) -> Result<Vec<f64>, EvalError> {
    let series = Series::new(values.to_vec())?;
    let series = if series.len() == target_len {
        series
    } else {
        series.resample(target_len)?
    };
    Ok(series.normalize().into_values())
}

/// Exhaustive scan for the entry with minimum mean squared error; the
/// lowest position wins ties.
pub fn nearnbr_caption(query: &[f64], index: &TrainIndex) -> Result<Neighbor, EvalError> {
    let expected = index.vector_len().ok_or(EvalError::EmptyIndex)?;
    if query.len() != expected {
        return Err(EvalError::LengthMismatch {
            expected,
            got: query.len(),
        });
    }
    let mut best = (0, f64::INFINITY);
    for (i, v) in index.vectors.iter().enumerate() {
        let mse = v.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / expected as f64;
        if mse < best.1 {
            best = (i, mse);
        }
    }
    let (position, mse) = best;
    Ok(Neighbor {
        position,
        id: index.ids[position].clone(),
        caption: index.captions[position].clone(),
        mse,
    })
}
