//! Variety accounting and core/periphery analysis for set-valued systems.
//!
//! A system is modeled by its component sets: a set of input elements and a
//! set of output elements, snapshotted at discrete time indices. On top of
//! that data model this crate provides:
//!
//! - [`variety`]: Shannon entropy of finite element collections, in bits,
//!   under a uniform (log-cardinality) or empirical (count-weighted)
//!   probability source.
//! - [`system`]: snapshots, traces, closed system/environment pairs, and
//!   subsystem projection.
//! - [`partition`]: residual change between two snapshots, core/periphery
//!   partitions, per-element membership timelines, and absorption events.
//! - [`regulator`]: outcome tables (payoff matrices), the requisite-variety
//!   lower bound, and exact/greedy synthesis of outcome-entropy-minimizing
//!   regulator policies.
//! - [`analysis`]: core-vs-periphery dominance scoring, system/environment
//!   symmetry classification, the blocking deduction rule, and regulator
//!   stability assessment.
//! - [`harness`]: deterministic, seeded simulators that generate traces and
//!   outcome logs exercising the analyses end to end.
//!
//! Everything operates on immutable values; all functions are safe to call
//! concurrently. All entropies are base-2 (bits). The crate is
//! `no_std`-compatible (requires `alloc`).

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod harness;
pub mod partition;
pub mod regulator;
pub mod system;
pub mod variety;

pub use error::{Error, Result};
pub use variety::{Distribution, VarietyMode};

pub(crate) mod math {
    /// Base-2 logarithm via `libm` so results do not depend on the platform
    /// libm that `std` happens to link.
    #[inline]
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }
}
