//! Dominance scoring, symmetry classification, and the blocking deduction.
//!
//! A partition's core and periphery each span two component sets. Their
//! varieties are measured over the disjoint union of the input and output
//! parts, with every element tagged by its component role so an input and
//! an output that happen to share a label never collide. An empty part has
//! variety 0 by convention.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::log2;
use crate::partition::CorePeripheryPartition;
use crate::regulator::OutcomeTable;
use crate::system::{ClosedSystemPair, SystemSnapshot};
use crate::variety::{self, VarietyMode};

/// Width of the balanced band when comparing core and periphery varieties.
pub const DEFAULT_BALANCE_EPSILON: f64 = 1e-9;

/// Margin by which the environment variety must exceed the system variety
/// for the blocking rule to fire.
pub const DEDUCTION_MARGIN: f64 = 1e-9;

/// Observation counts for the elements of a partition, per component role.
///
/// Used by empirical-mode scoring; counts are normally taken from the
/// later-time snapshot of the partition's interval, whose elements are
/// exactly core plus periphery.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartitionCounts {
    pub input: BTreeMap<String, u64>,
    pub output: BTreeMap<String, u64>,
}

impl PartitionCounts {
    /// Collects whatever counts a snapshot carries (missing maps become
    /// empty, and lookups against them report the missing element).
    pub fn from_snapshot(snapshot: &SystemSnapshot) -> Self {
        PartitionCounts {
            input: snapshot.input_counts.clone().unwrap_or_default(),
            output: snapshot.output_counts.clone().unwrap_or_default(),
        }
    }
}

/// Variety of the disjoint union of one input part and one output part.
fn part_variety(
    input: &BTreeSet<String>,
    output: &BTreeSet<String>,
    mode: VarietyMode,
    counts: Option<&PartitionCounts>,
) -> Result<f64> {
    let n = input.len() + output.len();
    if n == 0 {
        return Ok(0.0);
    }
    match mode {
        VarietyMode::Uniform => Ok(log2(n as f64)),
        VarietyMode::Empirical => {
            let mut weights = Vec::with_capacity(n);
            for (part, side) in [(input, true), (output, false)] {
                for element in part {
                    let map = counts.map(|c| if side { &c.input } else { &c.output });
                    let count = map
                        .and_then(|m| m.get(element))
                        .copied()
                        .ok_or_else(|| Error::MissingCounts { label: element.clone() })?;
                    weights.push(count);
                }
            }
            let total: u64 = weights.iter().sum();
            if total == 0 {
                return Err(Error::EmptySupport);
            }
            Ok(variety::entropy_of_probs(
                weights.iter().filter(|&&w| w > 0).map(|&w| w as f64 / total as f64),
            ))
        }
    }
}

fn single_set_variety(
    set: &BTreeSet<String>,
    mode: VarietyMode,
    counts: Option<&BTreeMap<String, u64>>,
) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    match mode {
        VarietyMode::Uniform => Ok(log2(set.len() as f64)),
        VarietyMode::Empirical => {
            let mut weights = Vec::with_capacity(set.len());
            for element in set {
                let count = counts
                    .and_then(|m| m.get(element))
                    .copied()
                    .ok_or_else(|| Error::MissingCounts { label: element.clone() })?;
                weights.push(count);
            }
            let total: u64 = weights.iter().sum();
            if total == 0 {
                return Err(Error::EmptySupport);
            }
            Ok(variety::entropy_of_probs(
                weights.iter().filter(|&&w| w > 0).map(|&w| w as f64 / total as f64),
            ))
        }
    }
}

/// Which of core and periphery carries more variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    CoreDominant,
    Balanced,
    PeripheryDominant,
}

impl Dominance {
    /// Ordinal position: core-dominant -1, balanced 0, periphery-dominant +1.
    pub fn ordinal(self) -> i8 {
        match self {
            Dominance::CoreDominant => -1,
            Dominance::Balanced => 0,
            Dominance::PeripheryDominant => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dominance::CoreDominant => "core_dominant",
            Dominance::Balanced => "balanced",
            Dominance::PeripheryDominant => "periphery_dominant",
        }
    }
}

/// The relative balance of core and periphery variety in one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceScore {
    pub score: Dominance,
    pub v_core: f64,
    pub v_periphery: f64,
    pub mode: VarietyMode,
}

/// Scores a partition's core-vs-periphery balance.
///
/// Empirical mode needs a count for every core and periphery element;
/// a missing one is reported as `missing-counts`.
pub fn dominance(
    partition: &CorePeripheryPartition,
    mode: VarietyMode,
    counts: Option<&PartitionCounts>,
) -> Result<DominanceScore> {
    dominance_with_epsilon(partition, mode, counts, DEFAULT_BALANCE_EPSILON)
}

pub fn dominance_with_epsilon(
    partition: &CorePeripheryPartition,
    mode: VarietyMode,
    counts: Option<&PartitionCounts>,
    balance_epsilon: f64,
) -> Result<DominanceScore> {
    let v_core = part_variety(&partition.core.input, &partition.core.output, mode, counts)?;
    let v_periphery =
        part_variety(&partition.periphery.input, &partition.periphery.output, mode, counts)?;
    let score = if v_periphery > v_core + balance_epsilon {
        Dominance::PeripheryDominant
    } else if v_core > v_periphery + balance_epsilon {
        Dominance::CoreDominant
    } else {
        Dominance::Balanced
    };
    Ok(DominanceScore { score, v_core, v_periphery, mode })
}

/// The region of the system-vs-environment symmetry table a pair of
/// dominance scores falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryRegion {
    /// The system is more periphery-dominant than its environment.
    SystemMorePeripheral,
    /// System and environment have the same relative balance.
    Symmetric,
    /// The system is more core-dominant than its environment.
    SystemMoreCoreDominant,
}

impl SymmetryRegion {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryRegion::SystemMorePeripheral => "system_more_peripheral",
            SymmetryRegion::Symmetric => "symmetric",
            SymmetryRegion::SystemMoreCoreDominant => "system_more_core_dominant",
        }
    }
}

/// One cell of the 3x3 symmetry table plus its region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCell {
    pub system_score: DominanceScore,
    pub environment_score: DominanceScore,
    pub region: SymmetryRegion,
}

/// Places a (system, environment) pair of dominance scores in the symmetry
/// table. The region depends only on the ordinal scores, never on the raw
/// bit values. Scores must have been computed under the same mode.
pub fn classify_pair(
    system: &DominanceScore,
    environment: &DominanceScore,
) -> Result<SymmetryCell> {
    if system.mode != environment.mode {
        return Err(Error::ModeMismatch);
    }
    let region = match system.score.ordinal().cmp(&environment.score.ordinal()) {
        core::cmp::Ordering::Greater => SymmetryRegion::SystemMorePeripheral,
        core::cmp::Ordering::Equal => SymmetryRegion::Symmetric,
        core::cmp::Ordering::Less => SymmetryRegion::SystemMoreCoreDominant,
    };
    Ok(SymmetryCell { system_score: *system, environment_score: *environment, region })
}

/// The premises the blocking rule was evaluated under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeductionPremises {
    pub stable: bool,
    /// Variety of the environment's exogenous-input core: core input
    /// elements not produced by the system at either end of the interval.
    pub v_env_core_inputs: f64,
    /// Variety of the system's output-component core.
    pub v_sys_core_outputs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeductionConclusion {
    /// The system must be addressing part of the environment's core variety
    /// with its periphery.
    PeripheryParticipates,
    Inconclusive,
}

impl DeductionConclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            DeductionConclusion::PeripheryParticipates => "periphery_participates",
            DeductionConclusion::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeductionReport {
    pub premises: DeductionPremises,
    pub conclusion: DeductionConclusion,
    pub rule_trace: String,
}

/// Applies the blocking rule in uniform mode: if the system is a stable
/// regulator and the environment's exogenous core-input variety exceeds the
/// system's core-output variety, the system's periphery must participate in
/// blocking.
pub fn blocking_deduction(
    sys_partition: &CorePeripheryPartition,
    env_partition: &CorePeripheryPartition,
    pair: &ClosedSystemPair,
    stability: bool,
) -> Result<DeductionReport> {
    blocking_deduction_with_mode(
        sys_partition,
        env_partition,
        pair,
        stability,
        VarietyMode::Uniform,
        None,
        None,
    )
}

pub fn blocking_deduction_with_mode(
    sys_partition: &CorePeripheryPartition,
    env_partition: &CorePeripheryPartition,
    pair: &ClosedSystemPair,
    stability: bool,
    mode: VarietyMode,
    sys_counts: Option<&PartitionCounts>,
    env_counts: Option<&PartitionCounts>,
) -> Result<DeductionReport> {
    if sys_partition.system_id != pair.system_id {
        return Err(Error::SystemMismatch {
            left: sys_partition.system_id.clone(),
            right: pair.system_id.clone(),
        });
    }
    if env_partition.system_id != pair.environment_id {
        return Err(Error::SystemMismatch {
            left: env_partition.system_id.clone(),
            right: pair.environment_id.clone(),
        });
    }
    if sys_partition.interval != env_partition.interval {
        return Err(Error::IntervalMismatch);
    }
    // System outputs seen at either end of the interval; an environment core
    // input is exogenous only if the system produced it at neither end.
    let sys_outputs: BTreeSet<String> = sys_partition
        .core
        .output
        .iter()
        .chain(&sys_partition.periphery.output)
        .chain(&sys_partition.shed.output)
        .cloned()
        .collect();
    let exogenous_core: BTreeSet<String> =
        env_partition.core.input.difference(&sys_outputs).cloned().collect();
    let v_env_core_inputs =
        single_set_variety(&exogenous_core, mode, env_counts.map(|c| &c.input))?;
    let v_sys_core_outputs =
        single_set_variety(&sys_partition.core.output, mode, sys_counts.map(|c| &c.output))?;
    let fires = stability && v_env_core_inputs > v_sys_core_outputs + DEDUCTION_MARGIN;
    let conclusion = if fires {
        DeductionConclusion::PeripheryParticipates
    } else {
        DeductionConclusion::Inconclusive
    };
    let rule_trace = alloc::format!(
        "stable={stability}; v_env_core_inputs={v_env_core_inputs} bits over {} exogenous core input(s); \
         v_sys_core_outputs={v_sys_core_outputs} bits over {} core output(s); mode={}; \
         rule: stable && v_env_core_inputs > v_sys_core_outputs + {DEDUCTION_MARGIN} => {}",
        exogenous_core.len(),
        sys_partition.core.output.len(),
        mode.as_str(),
        conclusion.as_str(),
    );
    Ok(DeductionReport {
        premises: DeductionPremises { stable: stability, v_env_core_inputs, v_sys_core_outputs },
        conclusion,
        rule_trace,
    })
}

/// Whether observed outcomes show the regulator holding the outcome steady:
/// true iff the empirical variety of the observations is at most the
/// threshold (0 bits by default, i.e. a constant outcome).
pub fn assess_stability(
    table: &OutcomeTable,
    observed_outcomes: &[String],
    threshold_bits: f64,
) -> Result<bool> {
    if observed_outcomes.is_empty() {
        return Err(Error::NoObservations);
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for z in observed_outcomes {
        if table.outcome_alphabet().binary_search(z).is_err() {
            return Err(Error::UnknownOutcome { label: z.clone() });
        }
        *counts.entry(z.clone()).or_insert(0) += 1;
    }
    let dist = variety::empirical_distribution(&counts)?;
    Ok(variety::variety(&dist) <= threshold_bits)
}
