//! Variety of finite element collections.
//!
//! Variety is the Shannon entropy, in bits, of the probability distribution
//! over a collection's elements: `-sum p_i * log2(p_i)` with the convention
//! `0 * log2(0) = 0`. Under the uniform distribution it reduces to the
//! log2 of the cardinality, which is the default everywhere in this crate;
//! the empirical mode weights elements by observation counts instead.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::log2;

/// How element probabilities are chosen when measuring variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarietyMode {
    /// Every element equally likely; variety is log2 of the cardinality.
    Uniform,
    /// Probabilities proportional to observation counts.
    Empirical,
}

impl VarietyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            VarietyMode::Uniform => "uniform",
            VarietyMode::Empirical => "empirical",
        }
    }
}

/// A validated probability distribution over labeled elements.
///
/// Invariants, enforced at construction: labels are unique, probabilities
/// are non-negative and sum to 1 within 1e-9, and the element list is
/// non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    elements: Vec<String>,
    probabilities: Vec<f64>,
}

/// Tolerance on the probability sum.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

impl Distribution {
    pub fn new(elements: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySupport);
        }
        if elements.len() != probabilities.len() {
            return Err(Error::TableShape {
                detail: alloc::format!(
                    "{} elements but {} probabilities",
                    elements.len(),
                    probabilities.len()
                ),
            });
        }
        let mut seen = alloc::collections::BTreeSet::new();
        for label in &elements {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateElement { label: label.clone() });
            }
        }
        let mut sum = 0.0;
        for (label, &p) in elements.iter().zip(&probabilities) {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeProbability { label: label.clone(), value: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Distribution { elements, probabilities })
    }

    /// The uniform distribution over the given labels.
    pub fn uniform<I>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = String>,
    {
        let elements: Vec<String> = labels.into_iter().collect();
        if elements.is_empty() {
            return Err(Error::EmptySupport);
        }
        let p = 1.0 / elements.len() as f64;
        let probabilities = alloc::vec![p; elements.len()];
        Distribution::new(elements, probabilities)
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn probability_of(&self, label: &str) -> Option<f64> {
        self.elements
            .iter()
            .position(|e| e == label)
            .map(|i| self.probabilities[i])
    }
}

/// Variety of a distribution: `-sum p_i * log2(p_i)` in bits.
///
/// Zero-probability elements contribute nothing (`0 * log2(0) = 0`). The
/// result lies in `[0, log2(n)]`.
pub fn variety(dist: &Distribution) -> f64 {
    entropy_of_probs(dist.probabilities.iter().copied())
}

/// Variety of a label set under the uniform distribution: `log2(|labels|)`.
pub fn uniform_variety<'a, I>(labels: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a String>,
{
    let n = labels.into_iter().count();
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    Ok(log2(n as f64))
}

/// Builds the distribution proportional to observation counts.
///
/// Zero-count labels are dropped from the support. Errors with
/// `empty-support` when every count is zero.
pub fn empirical_distribution(counts: &BTreeMap<String, u64>) -> Result<Distribution> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptySupport);
    }
    let mut elements = Vec::new();
    let mut probabilities = Vec::new();
    for (label, &count) in counts {
        if count == 0 {
            continue;
        }
        elements.push(label.clone());
        probabilities.push(count as f64 / total as f64);
    }
    Distribution::new(elements, probabilities)
}

/// Entropy in bits of an iterator of probabilities; zeros are skipped.
///
/// Clamped at 0: when accumulated probabilities sum a few ulps above 1, the
/// raw sum can come out microscopically negative.
pub(crate) fn entropy_of_probs<I>(probs: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut bits = 0.0;
    for p in probs {
        if p > 0.0 {
            bits -= p * log2(p);
        }
    }
    bits.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn uniform_over_eight_labels_is_three_bits() {
        let d = Distribution::uniform(labels(&["a", "b", "c", "d", "e", "f", "g", "h"])).unwrap();
        assert_eq!(variety(&d), 3.0);
    }

    #[test]
    fn point_mass_is_zero_bits() {
        let d = Distribution::new(labels(&["a"]), alloc::vec![1.0]).unwrap();
        assert_eq!(variety(&d), 0.0);
    }

    #[test]
    fn half_quarter_quarter_is_one_and_a_half_bits() {
        // direct summation: -(0.5*log2 0.5 + 2 * 0.25*log2 0.25) = 1.5
        let d = Distribution::new(labels(&["a", "b", "c"]), alloc::vec![0.5, 0.25, 0.25]).unwrap();
        assert!((variety(&d) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_elements_contribute_nothing() {
        let d = Distribution::new(labels(&["a", "b"]), alloc::vec![1.0, 0.0]).unwrap();
        assert_eq!(variety(&d), 0.0);
    }

    #[test]
    fn empty_support_is_rejected() {
        assert_eq!(Distribution::uniform(Vec::new()).unwrap_err().code(), "empty-support");
        assert_eq!(uniform_variety([].iter()).unwrap_err().code(), "empty-support");
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let err = Distribution::uniform(labels(&["a", "a"])).unwrap_err();
        assert_eq!(err.code(), "duplicate-element");
    }

    #[test]
    fn unnormalized_probabilities_are_rejected() {
        let err = Distribution::new(labels(&["a", "b"]), alloc::vec![0.5, 0.6]).unwrap_err();
        assert_eq!(err.code(), "not-normalized");
        let err = Distribution::new(labels(&["a", "b"]), alloc::vec![-0.5, 1.5]).unwrap_err();
        assert_eq!(err.code(), "negative-probability");
    }

    #[test]
    fn uniform_variety_matches_uniform_distribution() {
        let set = labels(&["a", "b", "c"]);
        let direct = uniform_variety(set.iter()).unwrap();
        let via_dist = variety(&Distribution::uniform(set).unwrap());
        assert!((direct - 1.584_962_500_721_156).abs() < 1e-12);
        assert!((direct - via_dist).abs() < 1e-12);
    }

    #[test]
    fn singleton_set_has_zero_variety() {
        let set = labels(&["a"]);
        assert_eq!(uniform_variety(set.iter()).unwrap(), 0.0);
    }

    #[test]
    fn four_labels_have_two_bits() {
        let set = labels(&["a", "b", "c", "d"]);
        assert_eq!(uniform_variety(set.iter()).unwrap(), 2.0);
    }

    #[test]
    fn empirical_equal_counts_is_uniform() {
        let counts: BTreeMap<String, u64> =
            [("a".to_string(), 2), ("b".to_string(), 2)].into_iter().collect();
        let d = empirical_distribution(&counts).unwrap();
        assert_eq!(d.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn empirical_counts_are_proportional() {
        let counts: BTreeMap<String, u64> =
            [("a".to_string(), 3), ("b".to_string(), 1)].into_iter().collect();
        let d = empirical_distribution(&counts).unwrap();
        assert_eq!(d.probability_of("a"), Some(0.75));
        assert_eq!(d.probability_of("b"), Some(0.25));
    }

    #[test]
    fn empirical_drops_zero_counts() {
        let counts: BTreeMap<String, u64> =
            [("a".to_string(), 1), ("b".to_string(), 0)].into_iter().collect();
        let d = empirical_distribution(&counts).unwrap();
        assert_eq!(d.elements(), &["a".to_string()]);
        assert_eq!(variety(&d), 0.0);
    }

    #[test]
    fn empirical_all_zero_counts_is_empty_support() {
        let counts: BTreeMap<String, u64> = [("a".to_string(), 0)].into_iter().collect();
        assert_eq!(empirical_distribution(&counts).unwrap_err().code(), "empty-support");
    }

    proptest! {
        #[test]
        fn variety_is_bounded_by_log_cardinality(weights in proptest::collection::vec(1u32..1000, 1..16)) {
            let total: u64 = weights.iter().map(|&w| w as u64).sum();
            let elements: Vec<String> = (0..weights.len()).map(|i| alloc::format!("e{i}")).collect();
            let probs: Vec<f64> = weights.iter().map(|&w| w as f64 / total as f64).collect();
            let d = Distribution::new(elements, probs).unwrap();
            let v = variety(&d);
            prop_assert!(v >= 0.0);
            prop_assert!(v <= log2(d.len() as f64) + 1e-12);
        }

        #[test]
        fn scaling_counts_leaves_variety_unchanged(
            weights in proptest::collection::vec(0u64..50, 1..12),
            k in 1u64..20,
        ) {
            prop_assume!(weights.iter().any(|&w| w > 0));
            let counts: BTreeMap<String, u64> = weights
                .iter()
                .enumerate()
                .map(|(i, &w)| (alloc::format!("e{i}"), w))
                .collect();
            let scaled: BTreeMap<String, u64> =
                counts.iter().map(|(l, &w)| (l.clone(), w * k)).collect();
            let v1 = variety(&empirical_distribution(&counts).unwrap());
            let v2 = variety(&empirical_distribution(&scaled).unwrap());
            prop_assert!((v1 - v2).abs() < 1e-12);
        }

        #[test]
        fn point_mass_and_uniform_attain_the_bounds(n in 1usize..20) {
            let elements: Vec<String> = (0..n).map(|i| alloc::format!("e{i}")).collect();
            let uniform = Distribution::uniform(elements.clone()).unwrap();
            prop_assert!((variety(&uniform) - log2(n as f64)).abs() < 1e-12);
            let mut probs = alloc::vec![0.0; n];
            probs[0] = 1.0;
            let point = Distribution::new(elements, probs).unwrap();
            prop_assert_eq!(variety(&point), 0.0);
        }
    }
}
