//! JSON-lines record types. A complete file holds one header, one line per
//! trial in index order, a summary and an end sentinel.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::census::CensusSummary;
use crate::error::{Error, Result};
use crate::generators::GenSpec;
use crate::percolation::DfsSummary;
use crate::spectral::{Certificate, SpectrumReport};
use crate::theory::TheoryPrediction;
use crate::verify::ViolationReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<GenSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub version: u32,
    pub config: BTreeMap<String, String>,
    pub graph: GraphInfo,
    pub p: f64,
    pub spectrum: Option<SpectrumReport>,
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum_error: Option<String>,
    pub prediction: TheoryPrediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub checker: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<ViolationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl CheckEntry {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<SpectrumReport>,
    pub census: CensusSummary,
    pub dfs: DfsSummary,
    /// Epoch partition equals the union-find components.
    pub oracle_agrees: bool,
    /// Census totals match the exploration's acceptance count.
    pub conserved: bool,
    pub cycle_witness_valid: Option<bool>,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// Median compared with a predicted value.
    Estimate,
    /// Fraction of trials meeting a bound, compared with a required rate.
    Bound,
    /// Fraction of trials on which a checker passed.
    Checker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub metric: String,
    pub claim: String,
    pub kind: RowKind,
    pub measured: f64,
    /// Predicted value (estimates), bound value (bounds) or 1 (checkers).
    pub target: f64,
    /// Absolute tolerance from the theory, when it gives one.
    pub bound_tol: Option<f64>,
    /// Relative tolerance (estimates) or required rate (bounds, checkers).
    pub configured_tol: f64,
    pub pass: bool,
    /// Whether `α` lies in the window the claim assumes.
    pub admissible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub metrics: BTreeMap<String, Stats>,
    pub rows: Vec<CompareRow>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Header(Box<Header>),
    Trial(Box<TrialRecord>),
    Summary(Box<Summary>),
    End { trials: usize },
}

impl Record {
    pub fn to_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Contents of a complete record file.
#[derive(Debug, Clone)]
pub struct RecordFile {
    pub header: Header,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Reads a record file, failing unless it ends with the sentinel.
pub fn read_records(path: impl AsRef<Path>) -> Result<RecordFile> {
    let path = path.as_ref();
    let incomplete = |reason: String| Error::Incomplete {
        path: path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(path)?;
    // every record is LF-terminated, so anything else is a torn write
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(incomplete("last line is truncated".into()));
    }
    let mut header = None;
    let mut trials = Vec::new();
    let mut summary = None;
    let mut ended = false;
    for (i, line) in text.lines().enumerate() {
        if ended {
            return Err(incomplete(format!("content after the end sentinel on line {}", i + 1)));
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        match record {
            Record::Header(h) if i == 0 => header = Some(*h),
            Record::Trial(t) if header.is_some() && summary.is_none() => {
                if t.trial != trials.len() {
                    return Err(incomplete(format!("trial {} out of order on line {}", t.trial, i + 1)));
                }
                trials.push(*t);
            }
            Record::Summary(s) if header.is_some() && summary.is_none() => summary = Some(*s),
            Record::End { trials: count } if summary.is_some() => {
                if count != trials.len() {
                    return Err(incomplete(format!(
                        "sentinel counts {count} trials, found {}",
                        trials.len()
                    )));
                }
                ended = true;
            }
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "record out of place".into(),
                })
            }
        }
    }
    if !ended {
        return Err(incomplete("missing end sentinel".into()));
    }
    Ok(RecordFile {
        header: header.expect("sentinel implies header"),
        trials,
        summary: summary.expect("sentinel implies summary"),
    })
}
