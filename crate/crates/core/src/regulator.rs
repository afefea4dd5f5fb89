//! Outcome tables and regulator-policy synthesis.
//!
//! An [`OutcomeTable`] maps (disturbance, response) pairs to outcome labels,
//! structurally a game-theoretic payoff matrix. A regulator fixes a total
//! deterministic policy from disturbances to responses; the induced outcome
//! distribution has a variety the regulator wants small. The requisite
//! variety bound says the achievable minimum is at least
//! `max(V(disturbances) - log2(|responses|), 0)`, where the regulator's own
//! variety is taken as the log-cardinality of its response set (its
//! capacity as a channel). The bound is a theorem only for structured
//! tables (injective-per-response columns, Latin squares); [`verify_bound`]
//! classifies the table and asserts the bound only where it applies.
//!
//! Deterministic policies suffice for this objective: the induced outcome
//! distribution of a stochastic policy is a mixture over deterministic
//! ones, and the minimum outcome entropy is attained at a vertex.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::log2;
use crate::variety::{self, Distribution};

/// Default cap on the number of policies the exhaustive search will visit.
pub const DEFAULT_POLICY_BUDGET: u64 = 10_000_000;

/// Slack used when asserting the requisite-variety bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Entropy values within this tolerance are considered tied; ties are broken
/// by lexicographic policy order.
pub const ENTROPY_TIE_TOLERANCE: f64 = 1e-12;

/// A payoff matrix over disturbances x responses with a distribution over
/// the disturbances.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    disturbances: Vec<String>,
    responses: Vec<String>,
    outcomes: Vec<Vec<String>>,
    disturbance_dist: Distribution,
    /// Sorted outcome alphabet and the row-major cell -> alphabet index map.
    outcome_labels: Vec<String>,
    outcome_ids: Vec<u32>,
}

impl OutcomeTable {
    /// Builds a table, validating shape, label uniqueness, and that the
    /// disturbance distribution is supported exactly on the disturbance
    /// labels in table order.
    pub fn new(
        disturbances: Vec<String>,
        responses: Vec<String>,
        outcomes: Vec<Vec<String>>,
        disturbance_dist: Distribution,
    ) -> Result<Self> {
        if disturbances.is_empty() || responses.is_empty() {
            return Err(Error::TableShape {
                detail: "disturbances and responses must be non-empty".into(),
            });
        }
        if outcomes.len() != disturbances.len() {
            return Err(Error::TableShape {
                detail: alloc::format!(
                    "{} outcome rows for {} disturbances",
                    outcomes.len(),
                    disturbances.len()
                ),
            });
        }
        for (i, row) in outcomes.iter().enumerate() {
            if row.len() != responses.len() {
                return Err(Error::TableShape {
                    detail: alloc::format!(
                        "row {i} has {} cells for {} responses",
                        row.len(),
                        responses.len()
                    ),
                });
            }
        }
        check_unique(&disturbances)?;
        check_unique(&responses)?;
        for row in &outcomes {
            for z in row {
                if z.is_empty() {
                    return Err(Error::EmptyLabel);
                }
            }
        }
        if disturbance_dist.elements() != disturbances.as_slice() {
            return Err(Error::DistributionMismatch);
        }
        let alphabet: BTreeSet<&String> = outcomes.iter().flatten().collect();
        let outcome_labels: Vec<String> = alphabet.into_iter().cloned().collect();
        let index: BTreeMap<&str, u32> = outcome_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let outcome_ids: Vec<u32> =
            outcomes.iter().flatten().map(|z| index[z.as_str()]).collect();
        Ok(OutcomeTable {
            disturbances,
            responses,
            outcomes,
            disturbance_dist,
            outcome_labels,
            outcome_ids,
        })
    }

    /// A table with the uniform distribution over its disturbances.
    pub fn with_uniform_disturbances(
        disturbances: Vec<String>,
        responses: Vec<String>,
        outcomes: Vec<Vec<String>>,
    ) -> Result<Self> {
        let dist = Distribution::uniform(disturbances.clone())?;
        OutcomeTable::new(disturbances, responses, outcomes, dist)
    }

    pub fn disturbances(&self) -> &[String] {
        &self.disturbances
    }

    pub fn responses(&self) -> &[String] {
        &self.responses
    }

    pub fn outcome(&self, disturbance: usize, response: usize) -> &str {
        &self.outcomes[disturbance][response]
    }

    pub fn outcome_rows(&self) -> &[Vec<String>] {
        &self.outcomes
    }

    pub fn disturbance_dist(&self) -> &Distribution {
        &self.disturbance_dist
    }

    /// Sorted alphabet of outcome labels appearing in the table.
    pub fn outcome_alphabet(&self) -> &[String] {
        &self.outcome_labels
    }

    /// Number of total policies, `|responses| ^ |disturbances|`, saturating.
    pub fn policy_count(&self) -> u128 {
        (self.responses.len() as u128)
            .checked_pow(self.disturbances.len() as u32)
            .unwrap_or(u128::MAX)
    }

    #[inline]
    pub(crate) fn cell_id(&self, disturbance: usize, response: usize) -> u32 {
        self.outcome_ids[disturbance * self.responses.len() + response]
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for label in labels {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if !seen.insert(label.as_str()) {
            return Err(Error::DuplicateElement { label: label.clone() });
        }
    }
    Ok(())
}

/// A total deterministic map from disturbances to responses, stored as a
/// response index per disturbance in table order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegulatorPolicy {
    assignments: Vec<usize>,
}

impl RegulatorPolicy {
    pub fn from_assignments(table: &OutcomeTable, assignments: Vec<usize>) -> Result<Self> {
        if assignments.len() != table.disturbances().len() {
            return Err(Error::InvalidPolicy {
                detail: alloc::format!(
                    "{} assignments for {} disturbances",
                    assignments.len(),
                    table.disturbances().len()
                ),
            });
        }
        if let Some(&bad) = assignments.iter().find(|&&r| r >= table.responses().len()) {
            return Err(Error::InvalidPolicy {
                detail: alloc::format!("response index {bad} out of range"),
            });
        }
        Ok(RegulatorPolicy { assignments })
    }

    /// Builds a policy from a label map; every disturbance must be mapped to
    /// a known response.
    pub fn from_map(table: &OutcomeTable, mapping: &BTreeMap<String, String>) -> Result<Self> {
        let mut assignments = Vec::with_capacity(table.disturbances().len());
        for d in table.disturbances() {
            let response = mapping.get(d).ok_or_else(|| Error::InvalidPolicy {
                detail: alloc::format!("disturbance {d:?} is unmapped"),
            })?;
            let r = table
                .responses()
                .iter()
                .position(|x| x == response)
                .ok_or_else(|| Error::InvalidPolicy {
                    detail: alloc::format!("unknown response {response:?}"),
                })?;
            assignments.push(r);
        }
        if mapping.len() != table.disturbances().len() {
            // extra keys that are not disturbances of this table
            for key in mapping.keys() {
                if !table.disturbances().contains(key) {
                    return Err(Error::InvalidPolicy {
                        detail: alloc::format!("unknown disturbance {key:?}"),
                    });
                }
            }
        }
        Ok(RegulatorPolicy { assignments })
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// The policy as a disturbance-label to response-label map.
    pub fn mapping(&self, table: &OutcomeTable) -> BTreeMap<String, String> {
        table
            .disturbances()
            .iter()
            .zip(&self.assignments)
            .map(|(d, &r)| (d.clone(), table.responses()[r].clone()))
            .collect()
    }

    fn check(&self, table: &OutcomeTable) -> Result<()> {
        if self.assignments.len() != table.disturbances().len()
            || self.assignments.iter().any(|&r| r >= table.responses().len())
        {
            return Err(Error::InvalidPolicy {
                detail: "policy does not fit this table".into(),
            });
        }
        Ok(())
    }
}

/// The outcome distribution induced by playing a fixed policy: the
/// probability of an outcome is the total probability of the disturbances
/// the policy steers onto it. Outcomes with zero mass are dropped.
pub fn outcome_distribution(
    table: &OutcomeTable,
    policy: &RegulatorPolicy,
) -> Result<Distribution> {
    policy.check(table)?;
    let mut probs = alloc::vec![0.0f64; table.outcome_labels.len()];
    accumulate_outcome_probs(table, policy.assignments(), &mut probs);
    let mut elements = Vec::new();
    let mut probabilities = Vec::new();
    for (id, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            elements.push(table.outcome_labels[id].clone());
            probabilities.push(p);
        }
    }
    Distribution::new(elements, probabilities)
}

fn accumulate_outcome_probs(table: &OutcomeTable, assignments: &[usize], probs: &mut [f64]) {
    probs.fill(0.0);
    let p = table.disturbance_dist.probabilities();
    for (d, &r) in assignments.iter().enumerate() {
        probs[table.cell_id(d, r) as usize] += p[d];
    }
}

fn policy_bits(table: &OutcomeTable, assignments: &[usize], probs: &mut [f64]) -> f64 {
    accumulate_outcome_probs(table, assignments, probs);
    variety::entropy_of_probs(probs.iter().copied())
}

/// Quantizes bits to the 1e-12 grid used by the tie-breaking order.
#[inline]
fn quantize(bits: f64) -> i64 {
    libm::round(bits / ENTROPY_TIE_TOLERANCE) as i64
}

/// The requisite-variety lower bound on the achievable outcome variety:
/// `max(V(disturbances) - log2(|responses|), 0)`.
pub fn lrv_lower_bound(table: &OutcomeTable) -> f64 {
    let v_d = variety::variety(&table.disturbance_dist);
    let v_r = log2(table.responses().len() as f64);
    (v_d - v_r).max(0.0)
}

/// Exhaustively minimizes outcome variety over all total policies.
///
/// Returns the exact minimum and, among minimizers (entropy ties within
/// 1e-12), the lexicographically smallest policy under the table's
/// disturbance and response ordering. The result is a function of the table
/// alone, so partitioned or sequential enumeration agree bit for bit.
///
/// Errors with `search-budget` when `|responses| ^ |disturbances|` exceeds
/// [`DEFAULT_POLICY_BUDGET`].
pub fn min_outcome_variety_bruteforce(table: &OutcomeTable) -> Result<(RegulatorPolicy, f64)> {
    min_outcome_variety_bruteforce_with_budget(table, DEFAULT_POLICY_BUDGET)
}

pub fn min_outcome_variety_bruteforce_with_budget(
    table: &OutcomeTable,
    budget: u64,
) -> Result<(RegulatorPolicy, f64)> {
    let count = table.policy_count();
    if count > budget as u128 {
        return Err(Error::SearchBudget { policies: count, budget });
    }
    let n_d = table.disturbances().len();
    let n_r = table.responses().len();
    let mut probs = alloc::vec![0.0f64; table.outcome_labels.len()];
    let mut assignments = alloc::vec![0usize; n_d];
    let mut best_assignments = assignments.clone();
    let mut best_bits = policy_bits(table, &assignments, &mut probs);
    let mut best_q = quantize(best_bits);
    // Lexicographically ascending enumeration: the first policy reaching the
    // minimal quantized entropy is the lexicographically smallest minimizer.
    while next_policy(&mut assignments, n_r) {
        let bits = policy_bits(table, &assignments, &mut probs);
        let q = quantize(bits);
        if q < best_q {
            best_q = q;
            best_bits = bits;
            best_assignments.copy_from_slice(&assignments);
        }
    }
    Ok((RegulatorPolicy { assignments: best_assignments }, best_bits))
}

/// Advances to the next policy in lexicographic order; false after the last.
fn next_policy(assignments: &mut [usize], n_responses: usize) -> bool {
    for slot in assignments.iter_mut().rev() {
        *slot += 1;
        if *slot < n_responses {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Hill-climbing policy synthesis for tables too large to enumerate.
///
/// Starts from the policy steering every disturbance toward the outcome
/// with the greatest achievable probability mass, then repeatedly applies
/// the single-disturbance reassignment that most decreases outcome variety
/// until no reassignment improves it. The reported variety is an upper
/// bound on the exhaustive minimum.
pub fn greedy_policy(table: &OutcomeTable) -> (RegulatorPolicy, f64) {
    let n_d = table.disturbances().len();
    let n_r = table.responses().len();
    let n_z = table.outcome_labels.len();
    let p = table.disturbance_dist.probabilities();

    // Achievable mass per outcome: each disturbance contributes its full
    // probability to every outcome reachable from its row.
    let mut mass = alloc::vec![0.0f64; n_z];
    let mut in_row = alloc::vec![false; n_z];
    for d in 0..n_d {
        in_row.fill(false);
        for r in 0..n_r {
            in_row[table.cell_id(d, r) as usize] = true;
        }
        for (z, &hit) in in_row.iter().enumerate() {
            if hit {
                mass[z] += p[d];
            }
        }
    }

    let mut assignments: Vec<usize> = (0..n_d)
        .map(|d| {
            let mut best_r = 0;
            let mut best_mass = mass[table.cell_id(d, 0) as usize];
            for r in 1..n_r {
                let m = mass[table.cell_id(d, r) as usize];
                if m > best_mass {
                    best_mass = m;
                    best_r = r;
                }
            }
            best_r
        })
        .collect();

    let mut probs = alloc::vec![0.0f64; n_z];
    let mut bits = policy_bits(table, &assignments, &mut probs);
    loop {
        let current_q = quantize(bits);
        let mut best_move: Option<(usize, usize, f64, i64)> = None;
        for d in 0..n_d {
            let original = assignments[d];
            for r in 0..n_r {
                if r == original {
                    continue;
                }
                assignments[d] = r;
                let candidate = policy_bits(table, &assignments, &mut probs);
                let q = quantize(candidate);
                if q < best_move.map_or(current_q, |(_, _, _, bq)| bq) {
                    best_move = Some((d, r, candidate, q));
                }
            }
            assignments[d] = original;
        }
        match best_move {
            Some((d, r, candidate, _)) => {
                assignments[d] = r;
                bits = candidate;
            }
            None => break,
        }
    }
    (RegulatorPolicy { assignments }, bits)
}

/// Structural classes of outcome tables, scoping where the entropy-form
/// requisite-variety bound is a theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableClass {
    /// Square table where every outcome appears exactly once per row and
    /// per column.
    LatinSquare,
    /// Every response column is an injective function of the disturbance.
    InjectivePerResponse,
    /// Some response column is constant while there are >= 2 disturbances.
    Degenerate,
    General,
}

impl TableClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TableClass::LatinSquare => "latin_square",
            TableClass::InjectivePerResponse => "injective_per_response",
            TableClass::Degenerate => "degenerate",
            TableClass::General => "general",
        }
    }
}

/// Classifies a table; classes are checked in the order latin_square,
/// injective_per_response, degenerate, general, and the first match wins.
pub fn table_class(table: &OutcomeTable) -> TableClass {
    let n_d = table.disturbances().len();
    let n_r = table.responses().len();
    let column_distinct = |r: usize| {
        let mut seen = BTreeSet::new();
        (0..n_d).all(|d| seen.insert(table.cell_id(d, r)))
    };
    if n_d == n_r && table.outcome_labels.len() == n_d {
        let rows_distinct = (0..n_d).all(|d| {
            let mut seen = BTreeSet::new();
            (0..n_r).all(|r| seen.insert(table.cell_id(d, r)))
        });
        if rows_distinct && (0..n_r).all(column_distinct) {
            return TableClass::LatinSquare;
        }
    }
    if (0..n_r).all(column_distinct) {
        return TableClass::InjectivePerResponse;
    }
    if n_d > 1 {
        let constant_column =
            |r: usize| (1..n_d).all(|d| table.cell_id(d, r) == table.cell_id(0, r));
        if (0..n_r).any(constant_column) {
            return TableClass::Degenerate;
        }
    }
    TableClass::General
}

/// The outcome of checking the requisite-variety bound on one table.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower_bound_bits: f64,
    pub achieved_min_bits: f64,
    pub optimal_policy: RegulatorPolicy,
    pub table_class: TableClass,
    /// True when the table class makes the bound a theorem; only then is
    /// `achieved >= bound` asserted.
    pub bound_applicable: bool,
}

/// Computes the bound, the exhaustive minimum, and the table class.
///
/// For applicable classes the report guarantees
/// `achieved_min_bits >= lower_bound_bits - 1e-9`; for other classes both
/// numbers are reported without assertion (a constant table shows why: its
/// achieved minimum is 0 regardless of the bound).
pub fn verify_bound(table: &OutcomeTable) -> Result<BoundReport> {
    verify_bound_with_budget(table, DEFAULT_POLICY_BUDGET)
}

pub fn verify_bound_with_budget(table: &OutcomeTable, budget: u64) -> Result<BoundReport> {
    let class = table_class(table);
    let lower_bound_bits = lrv_lower_bound(table);
    let (optimal_policy, achieved_min_bits) =
        min_outcome_variety_bruteforce_with_budget(table, budget)?;
    let bound_applicable =
        matches!(class, TableClass::LatinSquare | TableClass::InjectivePerResponse);
    if bound_applicable {
        // A theorem for these classes: (response, outcome) determines the
        // disturbance when columns are injective.
        assert!(
            achieved_min_bits >= lower_bound_bits - BOUND_TOLERANCE,
            "requisite-variety bound violated on an applicable table: \
             achieved {achieved_min_bits} < bound {lower_bound_bits}"
        );
    }
    Ok(BoundReport {
        lower_bound_bits,
        achieved_min_bits,
        optimal_policy,
        table_class: class,
        bound_applicable,
    })
}
