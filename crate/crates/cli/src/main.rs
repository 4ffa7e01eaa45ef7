use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use taco_core::annotator::{load_config, Annotator, ClassSet};
use taco_core::captioner::{base_caption, CaptionTemplateTable, Rephraser, DEFAULT_IN_FLIGHT, ENDPOINT_ENV, MODEL_ENV};
use taco_core::detectors::DetectorParams;
use taco_core::evalkit::{evaluate_corpus, load_captions, nearnbr_caption, prepare_query, EvalError, TrainIndex};
use taco_core::pipeline::{
    annotate_csv, build_dataset, build_forward_dataset, caption_records, forward_record, ingest_csv, read_jsonl_file,
    skip_log_path, write_jsonl, AnnotationRecord, BuildOptions, DatasetRecord, ForwardOptions, IngestSpec,
    PipelineError, SkipEntry,
};
use taco_core::synth::{Shape, SynthSpec, DEFAULT_LENGTH};

#[derive(Parser)]
#[command(name = "taco", version, about = "Descriptive classes and captions for time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign classes and scores to CSV windows
    Annotate {
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Turn annotation records (or a class list) into base captions
    Caption {
        /// Annotation JSONL produced by `annotate`
        #[arg(long, conflicts_with = "classes", required_unless_present = "classes")]
        input: Option<PathBuf>,
        /// Comma-separated class names; prints one caption
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<String>>,
        #[command(flatten)]
        rephrase: RephraseArgs,
        /// Output file (stdout if not given)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic signals with forward captions
    Synth {
        /// Number of records
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Master seed; record i uses a seed derived from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per signal
        #[arg(long, default_value_t = DEFAULT_LENGTH)]
        length: usize,
        /// Restrict base shapes (repeatable, or comma-separated)
        #[arg(long = "shape", value_delimiter = ',')]
        shapes: Vec<String>,
        /// Generate exactly the spec in this JSON file instead of sampling
        #[arg(long, conflicts_with_all = ["count", "shapes"])]
        spec: Option<PathBuf>,
        /// Append backward classes and captions
        #[arg(long)]
        annotate_also: bool,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Build a captioned dataset from CSV windows
    Dataset {
        #[command(flatten)]
        ingest: IngestArgs,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        rephrase: RephraseArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Caption queries with the nearest training signal
    Nearnbr {
        /// Training dataset JSONL (records must carry values)
        #[arg(long)]
        train: PathBuf,
        /// Query dataset JSONL with values
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        queries: Option<PathBuf>,
        #[command(flatten)]
        ingest: OptionalIngestArgs,
        /// Output file (stdout if not given)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score candidate captions against references
    Eval {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        /// Report file (stdout if not given)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IngestArgs {
    /// Input CSV files (header row required)
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Columns to use (default: every numeric column)
    #[arg(long = "column", value_delimiter = ',')]
    columns: Vec<String>,
    /// Window length in rows
    #[arg(long, default_value_t = IngestSpec::DEFAULT_WINDOW)]
    window: usize,
    /// Samples per window after resampling
    #[arg(long, default_value_t = IngestSpec::DEFAULT_TARGET)]
    target_len: usize,
    /// Rows between window starts (default: the window length)
    #[arg(long)]
    stride: Option<usize>,
}

impl IngestArgs {
    fn spec(&self) -> IngestSpec {
        IngestSpec {
            inputs: self.input.clone(),
            columns: (!self.columns.is_empty()).then(|| self.columns.clone()),
            window_len: self.window,
            target_len: self.target_len,
            stride: self.stride,
        }
    }
}

#[derive(Args)]
struct OptionalIngestArgs {
    /// Query CSV files, windowed like `dataset`
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long = "column", value_delimiter = ',')]
    columns: Vec<String>,
    #[arg(long, default_value_t = IngestSpec::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Args)]
struct DetectArgs {
    /// Threshold config JSON (default: built-in thresholds)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Detector parameter JSON (default: built-in parameters)
    #[arg(long)]
    params: Option<PathBuf>,
}

impl DetectArgs {
    fn annotator(&self) -> Result<Annotator, Failure> {
        let params = match &self.params {
            None => DetectorParams::default(),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?
            }
        };
        let config = load_config(self.config.as_deref()).map_err(Failure::data)?;
        Annotator::new(params, config).map_err(Failure::data)
    }
}

#[derive(Args)]
struct RephraseArgs {
    /// Rephrase base captions through the chat-completion endpoint
    #[arg(long)]
    rephrase: bool,
    #[arg(long, env = ENDPOINT_ENV)]
    endpoint: Option<String>,
    #[arg(long, env = MODEL_ENV)]
    model: Option<String>,
    /// Seed sent with rephrase requests
    #[arg(long = "rephrase-seed", default_value_t = 0)]
    seed: u64,
    /// Maximum concurrent rephrase requests
    #[arg(long, default_value_t = DEFAULT_IN_FLIGHT)]
    in_flight: usize,
}

impl RephraseArgs {
    fn rephraser(&self) -> Result<Option<Rephraser>, Failure> {
        if !self.rephrase {
            return Ok(None);
        }
        match (&self.endpoint, &self.model) {
            (Some(e), Some(m)) => Ok(Some(Rephraser::new(e.clone(), m.clone(), self.seed))),
            _ => Err(Failure::external(format!(
                "--rephrase needs an endpoint and model (--endpoint/--model or {ENDPOINT_ENV}/{MODEL_ENV})"
            ))),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Worker threads (0: one per core); output does not depend on it
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Leave signal values out of the records
    #[arg(long)]
    no_values: bool,
    /// Output file (stdout if not given); skipped windows go to <out>.skipped.jsonl
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn options(&self, rephraser: Option<Rephraser>, in_flight: usize) -> BuildOptions {
        BuildOptions {
            jobs: self.jobs,
            include_values: !self.no_values,
            rephraser,
            in_flight,
        }
    }
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(e: impl ToString) -> Self {
        Self { code: 2, message: e.to_string() }
    }

    fn external(e: impl ToString) -> Self {
        Self { code: 3, message: e.to_string() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Rephrase(_) => Failure::external(e),
            _ => Failure::data(e),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::data(e)
    }
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(out: Option<&Path>, records: &[T]) -> Result<(), Failure> {
    match write_jsonl(open_out(out)?, records) {
        // a closed downstream pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(Failure::data),
    }
}

fn emit_skips(out: Option<&Path>, skipped: &[SkipEntry]) -> Result<(), Failure> {
    match out {
        Some(path) => emit(Some(&skip_log_path(path)), skipped),
        None => {
            for s in skipped {
                eprintln!("skipped {}: {}", s.source, s.reason);
            }
            Ok(())
        }
    }
}

fn parse_shapes(names: &[String]) -> Result<Option<Vec<Shape>>, Failure> {
    if names.is_empty() {
        return Ok(None);
    }
    names
        .iter()
        .map(|n| n.parse().map_err(Failure::data))
        .collect::<Result<Vec<Shape>, _>>()
        .map(Some)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Annotate { ingest, detect, run } => {
            let annotator = detect.annotator()?;
            let out = annotate_csv(&ingest.spec(), &annotator, &run.options(None, 1))?;
            emit(run.out.as_deref(), &out.records)?;
            emit_skips(run.out.as_deref(), &out.skipped)
        }
        Command::Caption { input, classes, rephrase, out } => {
            let opts = BuildOptions {
                rephraser: rephrase.rephraser()?,
                in_flight: rephrase.in_flight,
                ..BuildOptions::default()
            };
            if let Some(names) = classes {
                let set: ClassSet = names
                    .iter()
                    .map(|n| n.trim().parse().map_err(Failure::data))
                    .collect::<Result<_, _>>()?;
                let base = base_caption(&set, &CaptionTemplateTable::default());
                let text = match &opts.rephraser {
                    Some(r) => r.rephrase(&base).map_err(Failure::external)?,
                    None => base,
                };
                let mut w = open_out(out.as_deref())?;
                return writeln!(w, "{text}").and_then(|_| w.flush()).map_err(Failure::data);
            }
            let input = input.expect("clap requires --input without --classes");
            let annotations: Vec<AnnotationRecord> = read_jsonl_file(&input)?;
            let records = caption_records(annotations, &CaptionTemplateTable::default(), &opts)?;
            emit(out.as_deref(), &records)
        }
        Command::Synth { count, seed, length, shapes, spec, annotate_also, detect, run } => {
            let fwd = ForwardOptions {
                count,
                master_seed: seed,
                length,
                shapes: parse_shapes(&shapes)?,
                annotate_also: if annotate_also { Some(detect.annotator()?) } else { None },
            };
            let records = match spec {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
                    let spec: SynthSpec =
                        serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
                    vec![forward_record(0, &spec, &fwd, !run.no_values)?]
                }
                None => build_forward_dataset(&fwd, &run.options(None, 1))?,
            };
            emit(run.out.as_deref(), &records)
        }
        Command::Dataset { ingest, detect, rephrase, run } => {
            let annotator = detect.annotator()?;
            let opts = run.options(rephrase.rephraser()?, rephrase.in_flight);
            let out = build_dataset(&ingest.spec(), &annotator, &opts)?;
            emit(run.out.as_deref(), &out.records)?;
            emit_skips(run.out.as_deref(), &out.skipped)
        }
        Command::Nearnbr { train, queries, ingest, out } => {
            let index = TrainIndex::load(&train)?;
            let len = index.vector_len().ok_or(EvalError::EmptyIndex)?;
            let queries: Vec<(String, Vec<f64>)> = match queries {
                Some(path) => read_jsonl_file::<DatasetRecord>(&path)?
                    .into_iter()
                    .map(|r| {
                        let values = r.values.ok_or_else(|| EvalError::MissingValues(r.id.clone()))?;
                        Ok((r.id, values))
                    })
                    .collect::<Result<_, EvalError>>()?,
                None => {
                    let spec = IngestSpec {
                        inputs: ingest.input.clone(),
                        columns: (!ingest.columns.is_empty()).then(|| ingest.columns.clone()),
                        window_len: ingest.window,
                        target_len: len.max(ingest.window),
                        stride: ingest.stride,
                    };
                    ingest_csv(&spec)?.into_iter().map(|w| (w.source, w.values)).collect()
                }
            };
            #[derive(Serialize)]
            struct Row {
                id: String,
                caption: String,
                neighbor_id: String,
                mse: f64,
            }
            let rows = queries
                .into_iter()
                .map(|(id, values)| {
                    let hit = nearnbr_caption(&prepare_query(&values, len)?, &index)?;
                    Ok(Row { id, caption: hit.caption, neighbor_id: hit.id, mse: hit.mse })
                })
                .collect::<Result<Vec<_>, EvalError>>()?;
            emit(out.as_deref(), &rows)
        }
        Command::Eval { candidates, references, out } => {
            let report = evaluate_corpus(&load_captions(&candidates)?, &load_captions(&references)?)?;
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)
                .map_err(Failure::data)
                .and_then(|_| writeln!(w).and_then(|_| w.flush()).map_err(Failure::data))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            eprintln!();
            let _ = Cli::command().print_help();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
