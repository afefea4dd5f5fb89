//! The JSONL trace format.
//!
//! One record per (system, time, component):
//!
//! ```text
//! {"t":0,"system":"S","component":"input","elements":["a","b"],"counts":{"a":2,"b":1}}
//! ```
//!
//! plus optional header records declaring pairs and subsystems:
//!
//! ```text
//! {"pair":{"system":"S","environment":"E"}}
//! {"subsystem":{"child":"sub","parent":"S"}}
//! ```
//!
//! Canonical serialization: headers first (pairs, then subsystems, each
//! sorted), snapshot records sorted by (system, t) with the input record
//! before the output record, keys in the order shown above, elements sorted
//! lexicographically, compact JSON, UTF-8, LF line endings. Parsing is the
//! left inverse of serialization: re-serializing a parsed canonical stream
//! reproduces it byte for byte.
//!
//! Within one system the stream must present records in non-decreasing time
//! order; a record missing for one component leaves that component set
//! empty at that time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use varietylab_core::system::{ClosedSystemPair, Component, SystemSnapshot, Trace};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotRecord {
    t: u64,
    system: String,
    component: String,
    elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, u64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairHeader {
    pair: PairDecl,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDecl {
    system: String,
    environment: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsystemHeader {
    subsystem: SubsystemDecl,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsystemDecl {
    child: String,
    parent: String,
}

type ComponentRecord = (Vec<String>, Option<BTreeMap<String, u64>>);

#[derive(Default)]
struct PartialSnapshot {
    inputs: Option<ComponentRecord>,
    outputs: Option<ComponentRecord>,
}

/// Parses a JSONL trace stream into a validated [`Trace`].
pub fn parse_trace(input: &str) -> Result<Trace> {
    let mut pairs: Vec<ClosedSystemPair> = Vec::new();
    let mut subsystem_map: BTreeMap<String, String> = BTreeMap::new();
    // (system, t) -> partial snapshot, plus the last time seen per system
    // for the stream-order check
    let mut partials: BTreeMap<(String, u64), PartialSnapshot> = BTreeMap::new();
    let mut last_time: BTreeMap<String, u64> = BTreeMap::new();

    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |message: String| Error::Malformed { line: Some(line_no), message };
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        let object = value.as_object().ok_or_else(|| malformed("expected an object".into()))?;
        if object.contains_key("pair") {
            let header: PairHeader =
                serde_json::from_value(value.clone()).map_err(|e| malformed(e.to_string()))?;
            let pair = ClosedSystemPair::new(header.pair.system, header.pair.environment);
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
            continue;
        }
        if object.contains_key("subsystem") {
            let header: SubsystemHeader =
                serde_json::from_value(value.clone()).map_err(|e| malformed(e.to_string()))?;
            let SubsystemDecl { child, parent } = header.subsystem;
            if let Some(existing) = subsystem_map.get(&child) {
                if *existing != parent {
                    return Err(malformed(format!(
                        "subsystem {child:?} declared with conflicting parents {existing:?} and {parent:?}"
                    )));
                }
            }
            subsystem_map.insert(child, parent);
            continue;
        }
        let record: SnapshotRecord =
            serde_json::from_value(value.clone()).map_err(|e| malformed(e.to_string()))?;
        let component = match record.component.as_str() {
            "input" => Component::Input,
            "output" => Component::Output,
            other => return Err(malformed(format!("unknown component {other:?}"))),
        };
        if let Some(&last) = last_time.get(&record.system) {
            if record.t < last {
                return Err(Error::Invalid {
                    line: Some(line_no),
                    source: varietylab_core::Error::TimeOrder {
                        system: record.system.clone(),
                        t: record.t,
                    },
                });
            }
        }
        last_time.insert(record.system.clone(), record.t);
        let partial = partials.entry((record.system.clone(), record.t)).or_default();
        let slot = match component {
            Component::Input => &mut partial.inputs,
            Component::Output => &mut partial.outputs,
        };
        if slot.is_some() {
            return Err(Error::Invalid {
                line: Some(line_no),
                source: varietylab_core::Error::DuplicateSnapshot {
                    system: record.system,
                    t: record.t,
                    component: component.as_str(),
                },
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for element in &record.elements {
            if !seen.insert(element.as_str()) {
                return Err(Error::Invalid {
                    line: Some(line_no),
                    source: varietylab_core::Error::DuplicateElement { label: element.clone() },
                });
            }
        }
        *slot = Some((record.elements, record.counts));
    }

    let mut snapshots = Vec::with_capacity(partials.len());
    for ((system, t), partial) in partials {
        let (inputs, input_counts) = partial.inputs.unwrap_or_default();
        let (outputs, output_counts) = partial.outputs.unwrap_or_default();
        snapshots.push(SystemSnapshot::with_counts(
            system,
            t,
            inputs.into_iter().collect(),
            outputs.into_iter().collect(),
            input_counts,
            output_counts,
        )?);
    }
    Ok(Trace::from_snapshots(snapshots, pairs, subsystem_map)?)
}

/// Serializes a trace in canonical form.
pub fn serialize_trace(trace: &Trace) -> String {
    let mut out = String::new();
    fn push<T: Serialize>(out: &mut String, value: &T) {
        out.push_str(&serde_json::to_string(value).expect("trace records serialize"));
        out.push('\n');
    }
    let mut pairs = trace.pairs().to_vec();
    pairs.sort();
    for pair in pairs {
        push(&mut out, &PairHeader {
            pair: PairDecl { system: pair.system_id, environment: pair.environment_id },
        });
    }
    for (child, parent) in trace.subsystem_map() {
        push(&mut out, &SubsystemHeader {
            subsystem: SubsystemDecl { child: child.clone(), parent: parent.clone() },
        });
    }
    for system in trace.system_ids() {
        for snap in trace.snapshots(system).expect("listed system exists") {
            for component in [Component::Input, Component::Output] {
                push(&mut out, &SnapshotRecord {
                    t: snap.t,
                    system: snap.system_id.clone(),
                    component: component.as_str().into(),
                    elements: snap.component(component).iter().cloned().collect(),
                    counts: snap.counts(component).cloned(),
                });
            }
        }
    }
    out
}
