//! On-disk formats: JSONL traces, JSON outcome tables, JSONL outcome logs.

pub mod outcome_log;
pub mod table;
pub mod trace;

pub use outcome_log::{parse_outcome_log, serialize_outcome_log};
pub use table::{parse_table, serialize_table};
pub use trace::{parse_trace, serialize_trace};
