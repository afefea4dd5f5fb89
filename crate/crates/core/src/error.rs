//! Error type shared by every module in the crate.
//!
//! Each variant carries a stable kebab-case code (see [`Error::code`]) that
//! callers such as the CLI print verbatim, so the codes are part of the
//! public contract and must not change.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution, label set, or count map with no support.
    EmptySupport,
    /// An element label is the empty string.
    EmptyLabel,
    /// The same label appears twice where uniqueness is required.
    DuplicateElement { label: String },
    /// A probability is negative.
    NegativeProbability { label: String, value: f64 },
    /// Probabilities do not sum to 1 within 1e-9.
    NotNormalized { sum: f64 },
    /// A disturbance distribution does not match the table's disturbance labels.
    DistributionMismatch,
    /// An outcome matrix does not have |disturbances| x |responses| cells.
    TableShape { detail: String },
    /// Two records describe the same (system, time, component).
    DuplicateSnapshot { system: String, t: u64, component: &'static str },
    /// Time indices are out of order.
    TimeOrder { system: String, t: u64 },
    /// No snapshot exists for the requested (system, time).
    MissingSnapshot { system: String, t: u64 },
    /// The requested system id is not present in the trace.
    UnknownSystem { id: String },
    /// An operation over two snapshots or partitions got different systems.
    SystemMismatch { left: String, right: String },
    /// The analysis needs more snapshots than the trace holds.
    InsufficientSnapshots { system: String, have: usize, need: usize },
    /// Claimed subsystem elements are not contained in the parent's sets.
    NotASubsystem { detail: String },
    /// A declared pair violates output-feeds-input coupling at some time.
    CouplingViolation { system: String, environment: String, t: u64 },
    /// A count key refers to an element outside the component set.
    UnknownCountElement { label: String },
    /// A policy maps unknown disturbances or to unknown responses.
    InvalidPolicy { detail: String },
    /// The policy space exceeds the configured enumeration budget.
    SearchBudget { policies: u128, budget: u64 },
    /// Empirical mode requested but an element has no observation count.
    MissingCounts { label: String },
    /// Two scores computed under different variety modes were compared.
    ModeMismatch,
    /// Two partitions over different intervals were combined.
    IntervalMismatch,
    /// Stability assessment received no observed outcomes.
    NoObservations,
    /// An observed outcome label is not in the table's outcome alphabet.
    UnknownOutcome { label: String },
    /// A simulation configuration violates its invariants.
    InvalidConfig { detail: String },
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySupport => "empty-support",
            Error::EmptyLabel => "empty-label",
            Error::DuplicateElement { .. } => "duplicate-element",
            Error::NegativeProbability { .. } => "negative-probability",
            Error::NotNormalized { .. } => "not-normalized",
            Error::DistributionMismatch => "distribution-mismatch",
            Error::TableShape { .. } => "table-shape",
            Error::DuplicateSnapshot { .. } => "duplicate-snapshot",
            Error::TimeOrder { .. } => "time-order",
            Error::MissingSnapshot { .. } => "missing-snapshot",
            Error::UnknownSystem { .. } => "unknown-system",
            Error::SystemMismatch { .. } => "system-mismatch",
            Error::InsufficientSnapshots { .. } => "insufficient-snapshots",
            Error::NotASubsystem { .. } => "not-a-subsystem",
            Error::CouplingViolation { .. } => "coupling-violation",
            Error::UnknownCountElement { .. } => "unknown-count-element",
            Error::InvalidPolicy { .. } => "invalid-policy",
            Error::SearchBudget { .. } => "search-budget",
            Error::MissingCounts { .. } => "missing-counts",
            Error::ModeMismatch => "mode-mismatch",
            Error::IntervalMismatch => "interval-mismatch",
            Error::NoObservations => "no-observations",
            Error::UnknownOutcome { .. } => "unknown-outcome",
            Error::InvalidConfig { .. } => "invalid-config",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySupport => write!(f, "empty support: at least one element with positive probability is required"),
            Error::EmptyLabel => write!(f, "element labels must be non-empty"),
            Error::DuplicateElement { label } => write!(f, "duplicate element label {label:?}"),
            Error::NegativeProbability { label, value } => {
                write!(f, "negative probability {value} for element {label:?}")
            }
            Error::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, expected 1 within 1e-9"),
            Error::DistributionMismatch => {
                write!(f, "disturbance distribution is not supported exactly on the table's disturbance labels")
            }
            Error::TableShape { detail } => write!(f, "malformed outcome table: {detail}"),
            Error::DuplicateSnapshot { system, t, component } => {
                write!(f, "duplicate snapshot record for system {system:?} at t={t} component {component}")
            }
            Error::TimeOrder { system, t } => {
                write!(f, "time index {t} for system {system:?} is out of order")
            }
            Error::MissingSnapshot { system, t } => {
                write!(f, "no snapshot for system {system:?} at t={t}")
            }
            Error::UnknownSystem { id } => write!(f, "unknown system id {id:?}"),
            Error::SystemMismatch { left, right } => {
                write!(f, "system mismatch: {left:?} vs {right:?}")
            }
            Error::InsufficientSnapshots { system, have, need } => {
                write!(f, "system {system:?} has {have} snapshot(s), analysis needs at least {need}")
            }
            Error::NotASubsystem { detail } => write!(f, "not a subsystem: {detail}"),
            Error::CouplingViolation { system, environment, t } => {
                write!(f, "outputs of {system:?} are not contained in inputs of {environment:?} at t={t}")
            }
            Error::UnknownCountElement { label } => {
                write!(f, "count key {label:?} is not an element of the component set")
            }
            Error::InvalidPolicy { detail } => write!(f, "invalid policy: {detail}"),
            Error::SearchBudget { policies, budget } => {
                write!(f, "policy space of {policies} exceeds the search budget of {budget}")
            }
            Error::MissingCounts { label } => {
                write!(f, "empirical mode requires a count for element {label:?}")
            }
            Error::ModeMismatch => write!(f, "variety modes of the compared scores differ"),
            Error::IntervalMismatch => write!(f, "partitions cover different intervals"),
            Error::NoObservations => write!(f, "no observed outcomes"),
            Error::UnknownOutcome { label } => {
                write!(f, "observed outcome {label:?} is not in the table's outcome alphabet")
            }
            Error::InvalidConfig { detail } => write!(f, "invalid configuration: {detail}"),
        }
    }
}

impl core::error::Error for Error {}
