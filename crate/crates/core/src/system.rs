//! Snapshots, traces, and closed system/environment pairs.
//!
//! A [`SystemSnapshot`] records a system's input and output component sets
//! at one time index. A [`Trace`] groups snapshots by system id, orders them
//! by time, and optionally declares system/environment pairs and
//! subsystem/parent relations. Elements are opaque text labels with exact
//! identity; continuous quantities must be discretized into labeled bins
//! before they enter a trace.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The two component roles of a system-as-relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Input,
    Output,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::Input => "input",
            Component::Output => "output",
        }
    }
}

/// A system's component sets at one time index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSnapshot {
    pub system_id: String,
    pub t: u64,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
    /// Optional observation counts, keyed by element; keys must be elements
    /// of the corresponding component set. Absent means "no counts".
    pub input_counts: Option<BTreeMap<String, u64>>,
    pub output_counts: Option<BTreeMap<String, u64>>,
}

impl SystemSnapshot {
    pub fn new(
        system_id: impl Into<String>,
        t: u64,
        inputs: BTreeSet<String>,
        outputs: BTreeSet<String>,
    ) -> Result<Self> {
        Self::with_counts(system_id, t, inputs, outputs, None, None)
    }

    pub fn with_counts(
        system_id: impl Into<String>,
        t: u64,
        inputs: BTreeSet<String>,
        outputs: BTreeSet<String>,
        input_counts: Option<BTreeMap<String, u64>>,
        output_counts: Option<BTreeMap<String, u64>>,
    ) -> Result<Self> {
        let system_id = system_id.into();
        if system_id.is_empty() {
            return Err(Error::EmptyLabel);
        }
        for label in inputs.iter().chain(outputs.iter()) {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
        }
        let input_counts = normalize_counts(input_counts, &inputs)?;
        let output_counts = normalize_counts(output_counts, &outputs)?;
        Ok(SystemSnapshot { system_id, t, inputs, outputs, input_counts, output_counts })
    }

    pub fn component(&self, component: Component) -> &BTreeSet<String> {
        match component {
            Component::Input => &self.inputs,
            Component::Output => &self.outputs,
        }
    }

    pub fn counts(&self, component: Component) -> Option<&BTreeMap<String, u64>> {
        match component {
            Component::Input => self.input_counts.as_ref(),
            Component::Output => self.output_counts.as_ref(),
        }
    }
}

fn normalize_counts(
    counts: Option<BTreeMap<String, u64>>,
    elements: &BTreeSet<String>,
) -> Result<Option<BTreeMap<String, u64>>> {
    match counts {
        None => Ok(None),
        Some(map) if map.is_empty() => Ok(None),
        Some(map) => {
            for key in map.keys() {
                if !elements.contains(key) {
                    return Err(Error::UnknownCountElement { label: key.clone() });
                }
            }
            Ok(Some(map))
        }
    }
}

/// Declares that one system's outputs feed another's inputs and vice versa.
///
/// The coupling invariant checked when both sides have a snapshot at a
/// shared time t: the system's output set is contained in the environment's
/// input set. The feedback channel (environment outputs appearing among the
/// system's inputs) may be empty in open-loop traces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClosedSystemPair {
    pub system_id: String,
    pub environment_id: String,
}

impl ClosedSystemPair {
    pub fn new(system_id: impl Into<String>, environment_id: impl Into<String>) -> Self {
        ClosedSystemPair { system_id: system_id.into(), environment_id: environment_id.into() }
    }
}

/// An ordered collection of snapshots, grouped by system id.
///
/// Immutable after construction; sharing a trace across concurrent analyses
/// is safe.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    systems: BTreeMap<String, Vec<SystemSnapshot>>,
    pairs: Vec<ClosedSystemPair>,
    subsystem_map: BTreeMap<String, String>,
}

impl Trace {
    /// The empty trace. Valid; analyses over it report missing systems.
    pub fn empty() -> Self {
        Trace::default()
    }

    /// Builds a validated trace from snapshots and optional declarations.
    ///
    /// Snapshots are normalized into (system_id, t) order. Validation
    /// rejects duplicate (system, t) snapshots, subsystem elements outside
    /// the parent's sets, and pair declarations whose coupling is violated
    /// at a shared time index.
    pub fn from_snapshots(
        snapshots: Vec<SystemSnapshot>,
        pairs: Vec<ClosedSystemPair>,
        subsystem_map: BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut systems: BTreeMap<String, Vec<SystemSnapshot>> = BTreeMap::new();
        for snap in snapshots {
            systems.entry(snap.system_id.clone()).or_default().push(snap);
        }
        for snaps in systems.values_mut() {
            snaps.sort_by_key(|s| s.t);
            for pair in snaps.windows(2) {
                if pair[0].t == pair[1].t {
                    return Err(Error::DuplicateSnapshot {
                        system: pair[0].system_id.clone(),
                        t: pair[0].t,
                        component: "input|output",
                    });
                }
            }
        }
        let trace = Trace { systems, pairs, subsystem_map };
        trace.validate()?;
        Ok(trace)
    }

    fn validate(&self) -> Result<()> {
        for (child, parent) in &self.subsystem_map {
            let Some(child_snaps) = self.systems.get(child) else { continue };
            for child_snap in child_snaps {
                let Ok(parent_snap) = self.snapshot_at(parent, child_snap.t) else { continue };
                if !child_snap.inputs.is_subset(&parent_snap.inputs)
                    || !child_snap.outputs.is_subset(&parent_snap.outputs)
                {
                    return Err(Error::NotASubsystem {
                        detail: alloc::format!(
                            "elements of {child:?} at t={} are not contained in {parent:?}",
                            child_snap.t
                        ),
                    });
                }
            }
        }
        for pair in &self.pairs {
            let Some(sys_snaps) = self.systems.get(&pair.system_id) else { continue };
            for sys_snap in sys_snaps {
                let Ok(env_snap) = self.snapshot_at(&pair.environment_id, sys_snap.t) else {
                    continue;
                };
                if !sys_snap.outputs.is_subset(&env_snap.inputs) {
                    return Err(Error::CouplingViolation {
                        system: pair.system_id.clone(),
                        environment: pair.environment_id.clone(),
                        t: sys_snap.t,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn system_ids(&self) -> impl Iterator<Item = &str> {
        self.systems.keys().map(String::as_str)
    }

    /// All snapshots of one system in increasing time order.
    pub fn snapshots(&self, system_id: &str) -> Result<&[SystemSnapshot]> {
        self.systems
            .get(system_id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownSystem { id: system_id.into() })
    }

    pub fn snapshot_at(&self, system_id: &str, t: u64) -> Result<&SystemSnapshot> {
        let snaps = self.snapshots(system_id)?;
        snaps
            .binary_search_by_key(&t, |s| s.t)
            .map(|i| &snaps[i])
            .map_err(|_| Error::MissingSnapshot { system: system_id.into(), t })
    }

    pub fn pairs(&self) -> &[ClosedSystemPair] {
        &self.pairs
    }

    pub fn subsystem_map(&self) -> &BTreeMap<String, String> {
        &self.subsystem_map
    }

    pub fn subsystem_parent(&self, child: &str) -> Option<&str> {
        self.subsystem_map.get(child).map(String::as_str)
    }

    /// Restricts the trace to one system's snapshots.
    ///
    /// A subsystem is itself a system, so the projection is a trace usable
    /// by every analysis in this crate. Idempotent. Errors with
    /// `unknown-system` if the id has neither snapshots nor a subsystem
    /// declaration.
    pub fn project_subsystem(&self, subsystem_id: &str) -> Result<Trace> {
        let declared = self.subsystem_map.contains_key(subsystem_id);
        let snaps = self.systems.get(subsystem_id);
        if !declared && snaps.is_none() {
            return Err(Error::UnknownSystem { id: subsystem_id.into() });
        }
        let mut systems = BTreeMap::new();
        if let Some(snaps) = snaps {
            systems.insert(subsystem_id.into(), snaps.clone());
        }
        let subsystem_map = self
            .subsystem_map
            .iter()
            .filter(|(child, _)| child.as_str() == subsystem_id)
            .map(|(c, p)| (c.clone(), p.clone()))
            .collect();
        Ok(Trace { systems, pairs: Vec::new(), subsystem_map })
    }
}

/// The environment's exogenous inputs at time t: its input set minus the
/// system's output set at the same time.
pub fn environment_exogenous_inputs(
    trace: &Trace,
    pair: &ClosedSystemPair,
    t: u64,
) -> Result<BTreeSet<String>> {
    let env = trace.snapshot_at(&pair.environment_id, t)?;
    let sys = trace.snapshot_at(&pair.system_id, t)?;
    Ok(env.inputs.difference(&sys.outputs).cloned().collect())
}
