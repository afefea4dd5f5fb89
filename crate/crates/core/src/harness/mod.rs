//! Deterministic simulators that generate traces exercising every analysis.
//!
//! Two generators are provided, both bit-deterministic in (seed, config):
//!
//! - [`simulate_adaptive_regulator`]: a frequency-greedy learner playing an
//!   outcome-table game against seeded disturbances. Its learned policy
//!   entries are exposed as labeled output elements (`policy:<d>-><r>`), so
//!   learning shows up as set churn: changing an entry sheds the old label
//!   and adds a new one, and a converged entry settles into the core. This
//!   is the smallest mechanism exhibiting the churn-then-stabilize
//!   trajectory of a trained learner whose parameters live in the
//!   periphery.
//! - [`simulate_drift_environment`]: an environment whose input alphabet
//!   turns over at a configurable rate, for environment-side core/periphery
//!   analysis.
//!
//! Neither generator is prescribed by the underlying theory; they are this
//! toolkit's own constructions. Randomness comes from [`rng::SplitMix64`],
//! a fixed, portable algorithm with published reference outputs, so traces
//! are byte-identical across runs and machines.

pub mod rng;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::regulator::OutcomeTable;
use crate::system::{SystemSnapshot, Trace};
use crate::variety::entropy_of_probs;
use rng::SplitMix64;

/// System id of the learning regulator in generated traces.
pub const REGULATOR_SYSTEM_ID: &str = "regulator";
/// System id of the environment in generated traces.
pub const ENVIRONMENT_SYSTEM_ID: &str = "environment";

/// One played round of the regulator game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeRecord {
    pub step: u64,
    pub disturbance: String,
    pub response: String,
    pub outcome: String,
}

/// Configuration of the adaptive-regulator simulation.
#[derive(Debug, Clone)]
pub struct RegulatorSimConfig {
    pub seed: u64,
    pub steps: u64,
    pub snapshot_cadence: u64,
    pub game: OutcomeTable,
}

impl RegulatorSimConfig {
    pub fn new(seed: u64, steps: u64, snapshot_cadence: u64, game: OutcomeTable) -> Result<Self> {
        if steps < 1 {
            return Err(Error::InvalidConfig { detail: "steps must be >= 1".into() });
        }
        if snapshot_cadence < 1 {
            return Err(Error::InvalidConfig { detail: "cadence must be >= 1".into() });
        }
        Ok(RegulatorSimConfig { seed, steps, snapshot_cadence, game })
    }
}

/// Configuration of the drifting-environment simulation.
#[derive(Debug, Clone)]
pub struct DriftSimConfig {
    pub seed: u64,
    pub steps: u64,
    pub snapshot_cadence: u64,
    /// Fraction of the alphabet replaced per cadence window, in [0, 1].
    pub drift_rate: f64,
    pub alphabet_size: usize,
}

impl DriftSimConfig {
    pub fn new(
        seed: u64,
        steps: u64,
        snapshot_cadence: u64,
        drift_rate: f64,
        alphabet_size: usize,
    ) -> Result<Self> {
        if steps < 1 {
            return Err(Error::InvalidConfig { detail: "steps must be >= 1".into() });
        }
        if snapshot_cadence < 1 {
            return Err(Error::InvalidConfig { detail: "cadence must be >= 1".into() });
        }
        if !(0.0..=1.0).contains(&drift_rate) {
            return Err(Error::InvalidConfig { detail: "drift rate must be in [0, 1]".into() });
        }
        if alphabet_size < 2 {
            return Err(Error::InvalidConfig { detail: "alphabet size must be >= 2".into() });
        }
        Ok(DriftSimConfig { seed, steps, snapshot_cadence, drift_rate, alphabet_size })
    }
}

/// Runs the regulator game: each step a disturbance is drawn from the
/// table's distribution, the regulator plays its learned entry (or a seeded
/// random response while unlearned), then refits that entry to the response
/// whose outcome minimizes the frequency-weighted outcome variety observed
/// so far, ties broken by response order.
///
/// Snapshots are emitted at t = 0, after every `snapshot_cadence` steps,
/// and after the final step. The regulator's output set holds the learned
/// policy entries as `policy:<d>-><r>` labels plus the fixed response
/// alphabet as `resp:<r>` labels; its input set holds the outcome labels
/// seen so far. The environment's input set is the (fixed) disturbance
/// alphabet and its output set is the outcome labels seen so far.
pub fn simulate_adaptive_regulator(config: &RegulatorSimConfig) -> (Trace, Vec<OutcomeRecord>) {
    let table = &config.game;
    let n_responses = table.responses().len();
    let n_outcomes = table.outcome_alphabet().len();
    let probabilities = table.disturbance_dist().probabilities();

    let mut rng = SplitMix64::new(config.seed);
    let mut policy: Vec<Option<usize>> = alloc::vec![None; table.disturbances().len()];
    let mut outcome_counts: Vec<u64> = alloc::vec![0; n_outcomes];
    let mut outcomes_seen: BTreeSet<String> = BTreeSet::new();
    let mut snapshots = Vec::new();
    let mut log = Vec::new();

    let emit = |t: u64,
                policy: &[Option<usize>],
                outcomes_seen: &BTreeSet<String>,
                snapshots: &mut Vec<SystemSnapshot>| {
        let mut regulator_outputs: BTreeSet<String> = table
            .responses()
            .iter()
            .map(|r| alloc::format!("resp:{r}"))
            .collect();
        for (d, entry) in policy.iter().enumerate() {
            if let Some(r) = entry {
                regulator_outputs.insert(alloc::format!(
                    "policy:{}->{}",
                    table.disturbances()[d],
                    table.responses()[*r]
                ));
            }
        }
        snapshots.push(
            SystemSnapshot::new(REGULATOR_SYSTEM_ID, t, outcomes_seen.clone(), regulator_outputs)
                .expect("simulator snapshot is valid"),
        );
        snapshots.push(
            SystemSnapshot::new(
                ENVIRONMENT_SYSTEM_ID,
                t,
                table.disturbances().iter().cloned().collect(),
                outcomes_seen.clone(),
            )
            .expect("simulator snapshot is valid"),
        );
    };

    emit(0, &policy, &outcomes_seen, &mut snapshots);
    for step in 1..=config.steps {
        let d = sample_index(probabilities, rng.next_f64());
        let r = match policy[d] {
            Some(r) => r,
            None => rng.next_below(n_responses as u64) as usize,
        };
        let z = table.cell_id(d, r) as usize;
        outcome_counts[z] += 1;
        outcomes_seen.insert(table.outcome_alphabet()[z].clone());
        log.push(OutcomeRecord {
            step,
            disturbance: table.disturbances()[d].clone(),
            response: table.responses()[r].clone(),
            outcome: table.outcome_alphabet()[z].clone(),
        });
        policy[d] = Some(best_response(table, d, &outcome_counts));
        if step % config.snapshot_cadence == 0 {
            emit(step, &policy, &outcomes_seen, &mut snapshots);
        }
    }
    if config.steps % config.snapshot_cadence != 0 {
        emit(config.steps, &policy, &outcomes_seen, &mut snapshots);
    }

    let trace = Trace::from_snapshots(snapshots, Vec::new(), BTreeMap::new())
        .expect("simulator trace is valid");
    (trace, log)
}

/// First index whose cumulative probability exceeds u.
fn sample_index(probabilities: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

/// The response for disturbance d whose outcome, added to the observation
/// counts, yields the lowest outcome variety. Ties (within 1e-12) go to the
/// lowest response index.
fn best_response(table: &OutcomeTable, d: usize, outcome_counts: &[u64]) -> usize {
    let total = outcome_counts.iter().sum::<u64>() + 1;
    let mut best = 0usize;
    let mut best_q = i64::MAX;
    for r in 0..table.responses().len() {
        let inc = table.cell_id(d, r) as usize;
        let bits = entropy_of_probs(outcome_counts.iter().enumerate().filter_map(|(z, &c)| {
            let c = c + u64::from(z == inc);
            (c > 0).then_some(c as f64 / total as f64)
        }));
        let q = libm::round(bits / 1e-12) as i64;
        if q < best_q {
            best_q = q;
            best = r;
        }
    }
    best
}

/// Runs the drifting environment: each cadence window, a seeded selection of
/// `floor(drift_rate * alphabet_size)` input labels is replaced with fresh
/// ones. Snapshots are emitted at t = 0, after every window, and after the
/// final step; the alphabet size is constant throughout.
pub fn simulate_drift_environment(config: &DriftSimConfig) -> Trace {
    let mut rng = SplitMix64::new(config.seed);
    let mut alphabet: BTreeSet<String> =
        (0..config.alphabet_size).map(|i| alloc::format!("e{i}")).collect();
    let mut next_label = config.alphabet_size;
    let replace_per_window = (config.drift_rate * config.alphabet_size as f64) as usize;

    let mut snapshots = Vec::new();
    let emit = |t: u64, alphabet: &BTreeSet<String>, snapshots: &mut Vec<SystemSnapshot>| {
        snapshots.push(
            SystemSnapshot::new(ENVIRONMENT_SYSTEM_ID, t, alphabet.clone(), BTreeSet::new())
                .expect("simulator snapshot is valid"),
        );
    };

    emit(0, &alphabet, &mut snapshots);
    for step in 1..=config.steps {
        if step % config.snapshot_cadence == 0 {
            // partial Fisher-Yates over the sorted alphabet picks the labels
            // to retire
            let mut labels: Vec<String> = alphabet.iter().cloned().collect();
            for i in 0..replace_per_window {
                let j = i + rng.next_below((labels.len() - i) as u64) as usize;
                labels.swap(i, j);
            }
            for retired in labels.iter().take(replace_per_window) {
                alphabet.remove(retired);
                alphabet.insert(alloc::format!("e{next_label}"));
                next_label += 1;
            }
            emit(step, &alphabet, &mut snapshots);
        }
    }
    if config.steps % config.snapshot_cadence != 0 {
        emit(config.steps, &alphabet, &mut snapshots);
    }

    Trace::from_snapshots(snapshots, Vec::new(), BTreeMap::new())
        .expect("simulator trace is valid")
}
