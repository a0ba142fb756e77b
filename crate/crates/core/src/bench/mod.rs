//! Benchmark harness: case ingestion, synthetic corpora, the four-way
//! comparison, per-agent-count aggregation and CSV emission.

mod ingest;
mod report;
mod run;
mod synth;

pub use ingest::{load_cases, parse_cases, write_cases, IngestOptions};
pub use report::{
    aggregate, emit_report, relative_gap, GroupStat, OverallStat, Provenance, Report,
    PROVENANCE_FILE, RESULTS_FILE,
};
pub use run::{run_comparison, AuditViolation, CaseFailure, CaseResult, RunConfig, RunOutcome};
pub use synth::{generate_synthetic, GeneratorProfile, ValuationStyle, POINT_BUDGET};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("record {index} (id {case_id:?}): {message}")]
    Record {
        index: usize,
        case_id: Option<String>,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("unknown generator profile {0:?} (expected spliddit, uniform, pairs or fixed-N)")]
    UnknownProfile(String),
    #[error("{0}")]
    Config(String),
    #[error("oracle audit failed: {0}")]
    Audit(Box<AuditViolation>),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
