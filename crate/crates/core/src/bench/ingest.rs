use std::fs;
use std::path::Path;

use serde_json::Value;

use super::BenchError;
use crate::model::{validate_instance, Instance};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IngestOptions {
    /// Rescale every non-zero valuation row to this total.
    pub normalize_total: Option<f64>,
}

/// Read a JSON case list: a top-level array of
/// `{"id", "agents", "items", "valuations"}` records, rows indexed by agent.
///
/// Data held in another export format only has to be converted into this
/// shape; everything downstream works on [`Instance`] values.
pub fn load_cases(
    path: impl AsRef<Path>,
    options: &IngestOptions,
) -> Result<Vec<Instance>, BenchError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_cases(&text, options)
}

pub fn parse_cases(text: &str, options: &IngestOptions) -> Result<Vec<Instance>, BenchError> {
    let records: Vec<Value> = serde_json::from_str(text).map_err(|e| BenchError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    records
        .into_iter()
        .enumerate()
        .map(|(index, record)| {
            let case_id = record.get("id").and_then(Value::as_str).map(str::to_string);
            let raw: Instance = serde_json::from_value(record).map_err(|e| BenchError::Record {
                index,
                case_id: case_id.clone(),
                message: e.to_string(),
            })?;
            let inst = validate_instance(raw)?;
            Ok(match options.normalize_total {
                Some(total) => inst.normalized(total),
                None => inst,
            })
        })
        .collect()
}

pub fn write_cases(path: impl AsRef<Path>, cases: &[Instance]) -> Result<(), BenchError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(cases).expect("instances serialize");
    fs::write(path, text + "\n").map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}
