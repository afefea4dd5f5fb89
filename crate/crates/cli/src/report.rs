//! Report documents and their canonical rendering.
//!
//! Every command emits one JSON document with a fixed key order (struct
//! declaration order), floats rounded to 12 significant digits before
//! serialization, and an embedded [`RunManifest`] as the final key. Nothing
//! time- or host-dependent enters a report, so identical inputs and flags
//! yield identical bytes.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use varietylab_core::partition::{
    AbsorptionEvent, ComponentSets, CorePeripheryPartition, Interval, MembershipEntry,
};
use varietylab_core::analysis::{DeductionReport, DominanceScore, SymmetryCell};
use varietylab_core::regulator::{BoundReport, OutcomeTable, RegulatorPolicy};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

/// Serializes a float at 12 significant digits.
pub fn sig12<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_f64(round_sig(*x, 12))
}

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a report: the command, the resolved flag
/// values, digests of the input files, the toolkit version, and the seed
/// when one was used.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            flags: BTreeMap::new(),
            inputs: BTreeMap::new(),
            version: TOOLKIT_VERSION.into(),
            seed: None,
        }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.into(), value.to_string());
        self
    }

    pub fn input(mut self, path: &std::path::Path, bytes: &[u8]) -> Self {
        self.inputs.insert(path.display().to_string(), sha256_hex(bytes));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Renders a report document; one JSON document, trailing newline.
pub fn render<T: Serialize>(report: &T, pretty: bool) -> String {
    let mut out = if pretty {
        serde_json::to_string_pretty(report).expect("reports serialize")
    } else {
        serde_json::to_string(report).expect("reports serialize")
    };
    out.push('\n');
    out
}

fn interval_json(interval: Interval) -> [u64; 2] {
    [interval.from, interval.to]
}

#[derive(Debug, Serialize)]
pub struct SetsJson {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

impl From<&ComponentSets> for SetsJson {
    fn from(sets: &ComponentSets) -> Self {
        SetsJson {
            input: sets.input.iter().cloned().collect(),
            output: sets.output.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VarietyReport {
    #[serde(serialize_with = "sig12")]
    pub bits: f64,
    pub mode: String,
    pub support: Vec<String>,
    pub manifest: RunManifest,
}

#[derive(Debug, Serialize)]
pub struct PartitionReport {
    pub system: String,
    pub interval: [u64; 2],
    pub core: SetsJson,
    pub periphery: SetsJson,
    pub shed: SetsJson,
    pub manifest: RunManifest,
}

impl PartitionReport {
    pub fn new(partition: &CorePeripheryPartition, manifest: RunManifest) -> Self {
        PartitionReport {
            system: partition.system_id.clone(),
            interval: interval_json(partition.interval),
            core: (&partition.core).into(),
            periphery: (&partition.periphery).into(),
            shed: (&partition.shed).into(),
            manifest,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TimelineStateJson {
    pub from: u64,
    pub to: u64,
    pub state: String,
}

#[derive(Debug, Serialize)]
pub struct TimelineJson {
    pub component: String,
    pub element: String,
    pub states: Vec<TimelineStateJson>,
}

pub fn timeline_json(component: &str, element: &str, entries: &[MembershipEntry]) -> TimelineJson {
    TimelineJson {
        component: component.into(),
        element: element.into(),
        states: entries
            .iter()
            .map(|e| TimelineStateJson {
                from: e.interval.from,
                to: e.interval.to,
                state: e.state.as_str().into(),
            })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct AbsorptionJson {
    pub first: [u64; 2],
    pub second: [u64; 2],
    pub absorbed: SetsJson,
}

impl From<&AbsorptionEvent> for AbsorptionJson {
    fn from(event: &AbsorptionEvent) -> Self {
        AbsorptionJson {
            first: interval_json(event.first),
            second: interval_json(event.second),
            absorbed: (&event.absorbed).into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DynamicsReport {
    pub system: String,
    pub timelines: Vec<TimelineJson>,
    pub absorption_events: Vec<AbsorptionJson>,
    pub manifest: RunManifest,
}

#[derive(Debug, Serialize)]
pub struct ScoreJson {
    pub score: String,
    #[serde(serialize_with = "sig12")]
    pub v_core: f64,
    #[serde(serialize_with = "sig12")]
    pub v_periphery: f64,
    pub mode: String,
}

impl From<&DominanceScore> for ScoreJson {
    fn from(score: &DominanceScore) -> Self {
        ScoreJson {
            score: score.score.as_str().into(),
            v_core: score.v_core,
            v_periphery: score.v_periphery,
            mode: score.mode.as_str().into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub system: String,
    pub environment: String,
    pub interval: [u64; 2],
    pub system_score: ScoreJson,
    pub environment_score: ScoreJson,
    pub region: String,
    pub manifest: RunManifest,
}

impl ClassifyReport {
    pub fn new(
        system: &str,
        environment: &str,
        interval: Interval,
        cell: &SymmetryCell,
        manifest: RunManifest,
    ) -> Self {
        ClassifyReport {
            system: system.into(),
            environment: environment.into(),
            interval: interval_json(interval),
            system_score: (&cell.system_score).into(),
            environment_score: (&cell.environment_score).into(),
            region: cell.region.as_str().into(),
            manifest,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundReportJson {
    pub table_class: String,
    #[serde(serialize_with = "sig12")]
    pub lower_bound_bits: f64,
    #[serde(serialize_with = "sig12")]
    pub achieved_min_bits: f64,
    pub bound_applicable: bool,
    pub optimal_policy: BTreeMap<String, String>,
    pub manifest: RunManifest,
}

impl BoundReportJson {
    pub fn new(report: &BoundReport, table: &OutcomeTable, manifest: RunManifest) -> Self {
        BoundReportJson {
            table_class: report.table_class.as_str().into(),
            lower_bound_bits: report.lower_bound_bits,
            achieved_min_bits: report.achieved_min_bits,
            bound_applicable: report.bound_applicable,
            optimal_policy: report.optimal_policy.mapping(table),
            manifest,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SynthReport {
    pub method: String,
    pub policy: BTreeMap<String, String>,
    #[serde(serialize_with = "sig12")]
    pub bits: f64,
    pub manifest: RunManifest,
}

impl SynthReport {
    pub fn new(
        method: &str,
        policy: &RegulatorPolicy,
        bits: f64,
        table: &OutcomeTable,
        manifest: RunManifest,
    ) -> Self {
        SynthReport { method: method.into(), policy: policy.mapping(table), bits, manifest }
    }
}

#[derive(Debug, Serialize)]
pub struct PremisesJson {
    pub stable: bool,
    #[serde(serialize_with = "sig12")]
    pub v_env_core_inputs: f64,
    #[serde(serialize_with = "sig12")]
    pub v_sys_core_outputs: f64,
}

#[derive(Debug, Serialize)]
pub struct DeduceReport {
    pub system: String,
    pub environment: String,
    pub interval: [u64; 2],
    pub premises: PremisesJson,
    pub conclusion: String,
    #[serde(serialize_with = "sig12")]
    pub threshold_bits: f64,
    pub observations: usize,
    pub rule_trace: String,
    pub manifest: RunManifest,
}

impl DeduceReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        system: &str,
        environment: &str,
        interval: Interval,
        report: &DeductionReport,
        threshold_bits: f64,
        observations: usize,
        manifest: RunManifest,
    ) -> Self {
        DeduceReport {
            system: system.into(),
            environment: environment.into(),
            interval: interval_json(interval),
            premises: PremisesJson {
                stable: report.premises.stable,
                v_env_core_inputs: report.premises.v_env_core_inputs,
                v_sys_core_outputs: report.premises.v_sys_core_outputs,
            },
            conclusion: report.conclusion.as_str().into(),
            threshold_bits,
            observations,
            rule_trace: report.rule_trace.clone(),
            manifest,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub kind: String,
    pub trace_path: String,
    pub trace_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_log_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_log_sha256: Option<String>,
    pub snapshots: usize,
    pub steps: u64,
    pub manifest: RunManifest,
}
