//! The outcome-table JSON format.
//!
//! ```text
//! {"disturbances":["d0","d1"],"responses":["r0"],"outcomes":[["a"],["b"]],"p_disturbance":[0.75,0.25]}
//! ```
//!
//! `outcomes` is row-major: one row per disturbance, one cell per response.
//! Omitting `p_disturbance` means the uniform distribution.

use serde::{Deserialize, Serialize};
use varietylab_core::regulator::OutcomeTable;
use varietylab_core::variety::Distribution;

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    disturbances: Vec<String>,
    responses: Vec<String>,
    outcomes: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_disturbance: Option<Vec<f64>>,
}

pub fn parse_table(json: &str) -> Result<OutcomeTable> {
    let file: TableFile = serde_json::from_str(json)
        .map_err(|e| Error::Malformed { line: None, message: e.to_string() })?;
    let dist = match file.p_disturbance {
        Some(p) => Distribution::new(file.disturbances.clone(), p)?,
        None => Distribution::uniform(file.disturbances.clone())?,
    };
    Ok(OutcomeTable::new(file.disturbances, file.responses, file.outcomes, dist)?)
}

/// Serializes a table; `p_disturbance` is omitted when the distribution is
/// exactly uniform.
pub fn serialize_table(table: &OutcomeTable) -> String {
    let uniform = 1.0 / table.disturbances().len() as f64;
    let probabilities = table.disturbance_dist().probabilities();
    let p_disturbance = if probabilities.iter().all(|&p| p == uniform) {
        None
    } else {
        Some(probabilities.to_vec())
    };
    let file = TableFile {
        disturbances: table.disturbances().to_vec(),
        responses: table.responses().to_vec(),
        outcomes: table.outcome_rows().to_vec(),
        p_disturbance,
    };
    let mut out = serde_json::to_string(&file).expect("table serializes");
    out.push('\n');
    out
}
