//! Dataset construction: CSV windows or synthetic specs in, JSONL records out.

mod ingest;

pub use ingest::{ingest_csv, read_columns, source_tag, IngestSpec, Window};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotator::{AnnotateError, Annotator, ClassSet};
use crate::captioner::{base_caption, CaptionTemplateTable, RephraseError, Rephraser, REPHRASE_PROMPT};
use crate::detectors::ScoreVector;
use crate::signal::Series;
use crate::synth::{derive_seed, generate, sample_spec, Shape, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {reason}", path.display())]
    Io { path: PathBuf, reason: String },
    #[error("{}: row {row}{}: {reason}", path.display(), column.as_ref().map(|c| format!(", column '{c}'")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        row: usize,
        column: Option<String>,
        reason: String,
    },
    #[error("line {line}: {reason}")]
    Json { line: usize, reason: String },
    #[error("{}: no numeric columns", .0.display())]
    NoNumericColumns(PathBuf),
    #[error("invalid ingest spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Rephrase(#[from] RephraseError),
}

/// Scores keyed by name; non-finite values become `null`.
pub type ScoreMap = BTreeMap<String, Option<f64>>;

pub fn score_map(scores: &ScoreVector<f64>) -> ScoreMap {
    scores
        .to_map()
        .into_iter()
        .map(|(k, v)| (k, v.is_finite().then_some(v)))
        .collect()
}

/// Output of the backward approach for one window, before captioning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub classes: ClassSet,
    pub scores: ScoreMap,
    pub config_digest: String,
}

/// One dataset row pairing a signal with its classes and caption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub classes: Vec<String>,
    pub scores: ScoreMap,
    pub caption_base: String,
    pub caption_rephrased: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rephrase_model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rephrase_prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth_spec: Option<SynthSpec>,
    pub config_digest: String,
}

/// A window that produced no record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipEntry {
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    pub include_values: bool,
    pub rephraser: Option<Rephraser>,
    pub in_flight: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            jobs: 0,
            include_values: true,
            rephraser: None,
            in_flight: crate::captioner::DEFAULT_IN_FLIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutput<R> {
    pub records: Vec<R>,
    pub skipped: Vec<SkipEntry>,
}

fn run_pool<R: Send>(jobs: usize, work: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
        .install(work)
}

/// Resamples, annotates and (optionally) stores normalized values for each
/// window. Output order matches input order for any worker count.
pub fn annotate_windows(
    windows: &[Window],
    target_len: usize,
    annotator: &Annotator,
    opts: &BuildOptions,
) -> BuildOutput<AnnotationRecord> {
    let results: Vec<Result<AnnotationRecord, SkipEntry>> = run_pool(opts.jobs, || {
        windows
            .par_iter()
            .map(|w| {
                annotate_window(w, target_len, annotator, opts.include_values).map_err(|e| SkipEntry {
                    source: w.source.clone(),
                    reason: e.to_string(),
                })
            })
            .collect()
    });
    let mut out = BuildOutput {
        records: Vec::new(),
        skipped: Vec::new(),
    };
    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(skip) => out.skipped.push(skip),
        }
    }
    out
}

fn annotate_window(
    w: &Window,
    target_len: usize,
    annotator: &Annotator,
    include_values: bool,
) -> Result<AnnotationRecord, AnnotateError> {
    let series = Series::new(w.values.clone())?.resample(target_len)?;
    let ann = annotator.annotate(&w.source, &series)?;
    Ok(AnnotationRecord {
        id: w.source.clone(),
        source: w.source.clone(),
        values: include_values.then(|| series.normalize().into_values()),
        classes: ann.classes,
        scores: score_map(&ann.scores),
        config_digest: ann.params_digest,
    })
}

pub fn annotate_csv(
    spec: &IngestSpec,
    annotator: &Annotator,
    opts: &BuildOptions,
) -> Result<BuildOutput<AnnotationRecord>, PipelineError> {
    let windows = ingest_csv(spec)?;
    Ok(annotate_windows(&windows, spec.target_len, annotator, opts))
}

/// Fills `caption_rephrased` for every record, keeping request order.
fn rephrase_records(records: &mut [DatasetRecord], opts: &BuildOptions) -> Result<(), PipelineError> {
    let Some(rephraser) = &opts.rephraser else {
        return Ok(());
    };
    let texts: Vec<String> = records.iter().map(|r| r.caption_base.clone()).collect();
    for (rec, result) in records.iter_mut().zip(rephraser.rephrase_many(&texts, opts.in_flight)) {
        rec.caption_rephrased = Some(result?);
        rec.rephrase_model = Some(rephraser.model().to_string());
        rec.rephrase_prompt = Some(REPHRASE_PROMPT.to_string());
    }
    Ok(())
}

/// Attaches base captions (and rephrasings when configured).
pub fn caption_records(
    annotations: Vec<AnnotationRecord>,
    table: &CaptionTemplateTable,
    opts: &BuildOptions,
) -> Result<Vec<DatasetRecord>, PipelineError> {
    let mut records: Vec<DatasetRecord> = annotations
        .into_iter()
        .map(|a| DatasetRecord {
            caption_base: base_caption(&a.classes, table),
            classes: a.classes.iter().map(|c| c.name().to_string()).collect(),
            id: a.id,
            source: a.source,
            values: a.values,
            scores: a.scores,
            caption_rephrased: None,
            rephrase_model: None,
            rephrase_prompt: None,
            synth_spec: None,
            config_digest: a.config_digest,
        })
        .collect();
    rephrase_records(&mut records, opts)?;
    Ok(records)
}

/// CSV windows to captioned records, plus skip entries for failed windows.
pub fn build_dataset(
    spec: &IngestSpec,
    annotator: &Annotator,
    opts: &BuildOptions,
) -> Result<BuildOutput<DatasetRecord>, PipelineError> {
    let annotated = annotate_csv(spec, annotator, opts)?;
    let records = caption_records(annotated.records, &CaptionTemplateTable::default(), opts)?;
    Ok(BuildOutput {
        records,
        skipped: annotated.skipped,
    })
}

/// Settings for a synthetic dataset.
#[derive(Debug, Clone)]
pub struct ForwardOptions {
    pub count: usize,
    pub master_seed: u64,
    pub length: usize,
    pub shapes: Option<Vec<Shape>>,
    /// Also run the backward approach and append its caption and classes.
    pub annotate_also: Option<Annotator>,
}

impl ForwardOptions {
    pub fn new(count: usize, master_seed: u64) -> Self {
        Self {
            count,
            master_seed,
            length: crate::synth::DEFAULT_LENGTH,
            shapes: None,
            annotate_also: None,
        }
    }
}

pub fn forward_record(index: usize, spec: &SynthSpec, fwd: &ForwardOptions, include_values: bool) -> Result<DatasetRecord, PipelineError> {
    let sample = generate(spec)?;
    let mut classes = sample.classes.clone();
    let mut caption = sample.caption.clone();
    let mut scores = ScoreMap::new();
    let mut digest = String::new();
    if let Some(annotator) = &fwd.annotate_also {
        let ann = annotator.annotate("", &sample.series)?;
        caption.push(' ');
        caption.push_str(&base_caption(&ann.classes, &CaptionTemplateTable::default()));
        for c in &ann.classes {
            if !classes.iter().any(|k| k == c.name()) {
                classes.push(c.name().to_string());
            }
        }
        scores = score_map(&ann.scores);
        digest = ann.params_digest;
    }
    Ok(DatasetRecord {
        id: format!("synth-{index:06}"),
        source: "synth".into(),
        values: include_values.then(|| sample.series.normalize().into_values()),
        classes,
        scores,
        caption_base: caption,
        caption_rephrased: None,
        rephrase_model: None,
        rephrase_prompt: None,
        synth_spec: Some(sample.spec),
        config_digest: digest,
    })
}

/// `count` synthetic records; record `i` uses a seed derived from the master seed.
pub fn build_forward_dataset(fwd: &ForwardOptions, opts: &BuildOptions) -> Result<Vec<DatasetRecord>, PipelineError> {
    if fwd.count == 0 {
        return Err(PipelineError::InvalidSpec("count must be at least 1".into()));
    }
    let shapes = fwd.shapes.as_deref();
    let mut records = run_pool(opts.jobs, || {
        (0..fwd.count)
            .into_par_iter()
            .map(|i| {
                let spec = sample_spec(derive_seed(fwd.master_seed, i as u64), fwd.length, shapes)?;
                forward_record(i, &spec, fwd, opts.include_values)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    rephrase_records(&mut records, opts)?;
    Ok(records)
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(mut w: impl Write, records: &[T]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Inverse of [`write_jsonl`]; blank lines are ignored.
pub fn read_jsonl<T: DeserializeOwned>(r: impl BufRead) -> Result<Vec<T>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| PipelineError::Json {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| PipelineError::Json {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_jsonl_file<T: Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    let file = File::create(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    write_jsonl(BufWriter::new(file), records).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn read_jsonl_file<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    read_jsonl(BufReader::new(file))
}

/// Sidecar path for the skip log: `out.jsonl` → `out.skipped.jsonl`.
pub fn skip_log_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.skipped.jsonl"))
}
