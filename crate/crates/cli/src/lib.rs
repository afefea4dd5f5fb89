//! IO layer and command-line front end for the variety toolkit.
//!
//! The algorithmic engine lives in `varietylab-core`; this crate adds the
//! file formats (JSONL traces and outcome logs, JSON outcome tables), the
//! canonical report rendering, and the `varietylab` binary. Reports are
//! single JSON documents on standard output with a fixed key order, floats
//! rounded to 12 significant digits, and no timestamps, so identical inputs
//! and flags produce byte-identical reports.

pub mod cli;
pub mod error;
pub mod formats;
pub mod report;

pub use error::{Error, Result};
