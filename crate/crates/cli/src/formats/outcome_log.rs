//! The outcome-log JSONL format: one played round per line.
//!
//! ```text
//! {"step":1,"d":"d3","r":"r1","z":"z2"}
//! ```

use serde::{Deserialize, Serialize};
use varietylab_core::harness::OutcomeRecord;

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogRecord {
    step: u64,
    d: String,
    r: String,
    z: String,
}

pub fn parse_outcome_log(input: &str) -> Result<Vec<OutcomeRecord>> {
    let mut records = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let record: LogRecord = serde_json::from_str(line)
            .map_err(|e| Error::Malformed { line: Some(idx + 1), message: e.to_string() })?;
        records.push(OutcomeRecord {
            step: record.step,
            disturbance: record.d,
            response: record.r,
            outcome: record.z,
        });
    }
    Ok(records)
}

pub fn serialize_outcome_log(records: &[OutcomeRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let line = LogRecord {
            step: record.step,
            d: record.disturbance.clone(),
            r: record.response.clone(),
            z: record.outcome.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("log records serialize"));
        out.push('\n');
    }
    out
}
