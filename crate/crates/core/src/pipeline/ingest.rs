use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::signal::Series;

/// Which CSV files and columns to window, and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSpec {
    pub inputs: Vec<PathBuf>,
    /// Column names to use; `None` takes every column whose first cell is numeric.
    pub columns: Option<Vec<String>>,
    pub window_len: usize,
    pub target_len: usize,
    /// Defaults to `window_len` (non-overlapping windows).
    pub stride: Option<usize>,
}

impl IngestSpec {
    pub const DEFAULT_WINDOW: usize = 300;
    pub const DEFAULT_TARGET: usize = 2048;

    pub fn new(inputs: Vec<PathBuf>) -> Self {
        Self {
            inputs,
            columns: None,
            window_len: Self::DEFAULT_WINDOW,
            target_len: Self::DEFAULT_TARGET,
            stride: None,
        }
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(self.window_len)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::InvalidSpec(msg));
        if self.window_len < Series::<f64>::MIN_LEN {
            return bad(format!(
                "window length {} is below the minimum of {}",
                self.window_len,
                Series::<f64>::MIN_LEN
            ));
        }
        if self.target_len < self.window_len {
            return bad(format!(
                "target length {} is shorter than the window length {}",
                self.target_len, self.window_len
            ));
        }
        if self.stride() == 0 {
            return bad("stride must be positive".into());
        }
        if self.inputs.is_empty() {
            return bad("no input files".into());
        }
        Ok(())
    }
}

/// One raw window of a CSV column, tagged `file#column#window`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub source: String,
    pub values: Vec<f64>,
}

pub fn source_tag(path: &Path, column: &str, index: usize) -> String {
    format!("{}#{column}#{index}", path.display())
}

/// Reads every input and cuts the selected columns into windows, ordered by
/// file, then column, then window. Incomplete tails are dropped.
pub fn ingest_csv(spec: &IngestSpec) -> Result<Vec<Window>, PipelineError> {
    spec.validate()?;
    let mut out = Vec::new();
    for path in &spec.inputs {
        for (name, column) in read_columns(path, spec.columns.as_deref())? {
            let mut start = 0;
            let mut index = 0;
            while start + spec.window_len <= column.len() {
                out.push(Window {
                    source: source_tag(path, &name, index),
                    values: column[start..start + spec.window_len].to_vec(),
                });
                start += spec.stride();
                index += 1;
            }
        }
    }
    Ok(out)
}

/// Parses the selected numeric columns of one file. Rows are reported
/// 1-based, counting data rows only.
pub fn read_columns(path: &Path, selection: Option<&[String]>) -> Result<Vec<(String, Vec<f64>)>, PipelineError> {
    let io_err = |e: &dyn std::fmt::Display| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(&e))?;
    let headers: Vec<String> = reader.headers().map_err(|e| io_err(&e))?.iter().map(str::to_string).collect();

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PipelineError::Parse {
            path: path.to_path_buf(),
            row: i + 1,
            column: None,
            reason: e.to_string(),
        })?;
        rows.push(record);
    }

    let selected: Vec<usize> = match selection {
        Some(names) => names
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| PipelineError::InvalidSpec(format!("{}: no column '{name}'", path.display())))
            })
            .collect::<Result<_, _>>()?,
        None => (0..headers.len())
            .filter(|&c| rows.first().is_some_and(|r| r.get(c).is_some_and(|v| v.parse::<f64>().is_ok())))
            .collect(),
    };
    if selected.is_empty() {
        return Err(PipelineError::NoNumericColumns(path.to_path_buf()));
    }

    selected
        .into_iter()
        .map(|c| {
            let values = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let cell = r.get(c).unwrap_or("");
                    cell.parse::<f64>().map_err(|_| PipelineError::Parse {
                        path: path.to_path_buf(),
                        row: i + 1,
                        column: Some(headers[c].clone()),
                        reason: format!("non-numeric cell '{cell}'"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((headers[c].clone(), values))
        })
        .collect()
}
