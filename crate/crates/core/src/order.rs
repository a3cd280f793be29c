//! The dominance partial order on tie profiles, the incomparability and
//! conflict censuses, and linear extensions of the order.
//!
//! A profile `a` dominates `b` when `a` has at least as many events and each
//! of its first `|b|` entries is no larger: more events and smaller events
//! make stronger ties. The censuses stream over tie pairs grouped by
//! distinct profile, so the full quadratic pair space is never materialized.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BipartiteGraph, GraphError, PersonRef, TieProfile};
use crate::measures::TieScoreTable;
use crate::scalar::{ExtensionValue, Real};

/// Outcome of comparing two profiles under the dominance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRelation {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl OrderRelation {
    pub fn reverse(self) -> Self {
        match self {
            Self::Less => Self::Greater,
            Self::Greater => Self::Less,
            other => other,
        }
    }
}

#[derive(Debug, Error)]
pub enum OrderError {
    #[error("profile sizes not sorted ascending: {0:?}")]
    Unsorted(Vec<u32>),
    #[error("score table has no entry for tie {0:?} -- {1:?}")]
    MissingScore(String, String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn dominates(a: &TieProfile, b: &TieProfile) -> bool {
    a.len() >= b.len()
        && a.sizes()
            .iter()
            .zip(b.sizes())
            .all(|(&ai, &bi)| ai <= bi)
}

/// Compare two tie profiles under the dominance order.
pub fn compare_profiles(a: &TieProfile, b: &TieProfile) -> OrderRelation {
    if a == b {
        OrderRelation::Equal
    } else if dominates(a, b) {
        OrderRelation::Greater
    } else if dominates(b, a) {
        OrderRelation::Less
    } else {
        OrderRelation::Incomparable
    }
}

/// Compare raw ascending size sequences; unsorted input is rejected.
pub fn compare_sorted_sizes(a: &[u32], b: &[u32]) -> Result<OrderRelation, OrderError> {
    for seq in [a, b] {
        if seq.windows(2).any(|w| w[0] > w[1]) {
            return Err(OrderError::Unsorted(seq.to_vec()));
        }
    }
    let a = TieProfile::new(a.to_vec()).map_err(OrderError::Graph)?;
    let b = TieProfile::new(b.to_vec()).map_err(OrderError::Graph)?;
    Ok(compare_profiles(&a, &b))
}

/// Census totals: `count` unordered tie-pairs out of `total` examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusResult {
    pub total: u64,
    pub count: u64,
}

impl CensusResult {
    pub fn percentage(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count as f64 / self.total as f64
        }
    }
}

/// Conflict census between the partial order and a score table.
///
/// `conflicts` counts strict inversions only: the order says one tie is
/// strictly greater yet the score is strictly lower. Score ties across a
/// strictly ordered profile pair are tallied separately as
/// `weak_disagreements` and excluded from the conflict count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConflictCensus {
    pub total: u64,
    pub conflicts: u64,
    pub weak_disagreements: u64,
}

impl ConflictCensus {
    pub fn percentage(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.conflicts as f64 / self.total as f64
        }
    }
}

/// Group the graph's ties by their tie profile.
pub fn ties_by_profile(
    g: &BipartiteGraph,
) -> Result<BTreeMap<TieProfile, Vec<(PersonRef, PersonRef)>>, GraphError> {
    let mut groups: BTreeMap<TieProfile, Vec<(PersonRef, PersonRef)>> = BTreeMap::new();
    for (u, v) in g.all_ties() {
        groups.entry(g.tie_profile(u, v)?).or_default().push((u, v));
    }
    Ok(groups)
}

/// Count tie-pairs the partial order cannot rank, over all unordered pairs
/// of ties. Profile-equal pairs count as comparable (the order resolves
/// them as equal).
pub fn incomparability_census(g: &BipartiteGraph) -> Result<CensusResult, GraphError> {
    let groups: Vec<(TieProfile, u64)> = ties_by_profile(g)?
        .into_iter()
        .map(|(p, ties)| (p, ties.len() as u64))
        .collect();
    let tie_count: u64 = groups.iter().map(|(_, n)| n).sum();
    let total = tie_count * tie_count.saturating_sub(1) / 2;
    let count = (0..groups.len())
        .into_par_iter()
        .map(|i| {
            let (profile_i, n_i) = &groups[i];
            groups[i + 1..]
                .iter()
                .filter(|(profile_j, _)| {
                    compare_profiles(profile_i, profile_j) == OrderRelation::Incomparable
                })
                .map(|(_, n_j)| n_i * n_j)
                .sum::<u64>()
        })
        .sum();
    Ok(CensusResult { total, count })
}

/// Count strict inversions between the partial order and a measure's scores
/// over all unordered tie-pairs. Every tie must be scored.
pub fn conflict_census<S: Real>(
    g: &BipartiteGraph,
    scores: &TieScoreTable<S>,
) -> Result<ConflictCensus, OrderError> {
    let mut groups: Vec<(TieProfile, Vec<S>)> = Vec::new();
    for (profile, ties) in ties_by_profile(g)? {
        let mut values = Vec::with_capacity(ties.len());
        for (u, v) in ties {
            let (a, b) = (g.person_label(u), g.person_label(v));
            let score = scores
                .get_present(a, b)
                .ok_or_else(|| OrderError::MissingScore(a.to_owned(), b.to_owned()))?;
            values.push(score);
        }
        values.sort_by(|x, y| x.partial_cmp(y).expect("finite score"));
        groups.push((profile, values));
    }
    let tie_count: u64 = groups.iter().map(|(_, v)| v.len() as u64).sum();
    let total = tie_count * tie_count.saturating_sub(1) / 2;
    let (conflicts, weak) = (0..groups.len())
        .into_par_iter()
        .map(|i| {
            let (profile_i, scores_i) = &groups[i];
            let mut conflicts = 0_u64;
            let mut weak = 0_u64;
            for (profile_j, scores_j) in &groups[i + 1..] {
                let (high, low) = match compare_profiles(profile_i, profile_j) {
                    OrderRelation::Greater => (scores_i, scores_j),
                    OrderRelation::Less => (scores_j, scores_i),
                    _ => continue,
                };
                // Inversion: a tie on the greater profile scoring strictly
                // below a tie on the lesser one.
                for &s in high {
                    let above = low.partition_point(|&x| x <= s);
                    conflicts += (low.len() - above) as u64;
                    let first_eq = low.partition_point(|&x| x < s);
                    weak += (above - first_eq) as u64;
                }
            }
            (conflicts, weak)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ConflictCensus {
        total,
        conflicts,
        weak_disagreements: weak,
    })
}

/// A total order on profiles: each profile carries a value, and profile-key
/// order (length, then entries) breaks ties between incomparable profiles
/// that received equal values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionTable<V> {
    values: BTreeMap<TieProfile, V>,
}

impl<V: ExtensionValue> ExtensionTable<V> {
    pub fn from_values(values: BTreeMap<TieProfile, V>) -> Self {
        Self { values }
    }

    pub fn value(&self, profile: &TieProfile) -> Option<&V> {
        self.values.get(profile)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TieProfile, &V)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Construct a linear extension of the dominance order over `profiles`.
///
/// Profiles are processed ascending by (length, entries). The empty profile
/// seeds 0 and the single-event profile `(n)` seeds `1/(n-1)`; every other
/// profile takes the midpoint of the largest value assigned strictly below
/// it and the smallest assigned strictly above it, with an implicit bottom
/// at 0 (so a profile with nothing assigned above gets `below + 1`).
pub fn build_linear_extension<V: ExtensionValue>(
    profiles: impl IntoIterator<Item = TieProfile>,
) -> ExtensionTable<V> {
    let profiles: BTreeSet<TieProfile> = profiles.into_iter().collect();
    let mut assigned: Vec<(TieProfile, V)> = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let value = if profile.is_empty() {
            V::zero()
        } else if profile.len() == 1 {
            V::single_event_seed(profile.sizes()[0])
        } else {
            // The empty profile is below everything, so a greatest assigned
            // lower bound always exists.
            let mut below = V::zero();
            let mut above: Option<V> = None;
            for (other, value) in &assigned {
                match compare_profiles(&profile, other) {
                    OrderRelation::Greater => {
                        if *value > below {
                            below = value.clone();
                        }
                    }
                    OrderRelation::Less => {
                        if above.as_ref().is_none_or(|a| value < a) {
                            above = Some(value.clone());
                        }
                    }
                    // Identical profiles cannot recur out of a set; an equal
                    // element would copy its value here.
                    OrderRelation::Equal => unreachable!("set input"),
                    OrderRelation::Incomparable => {}
                }
            }
            match above {
                Some(above) => V::midpoint(below, above),
                None => below + V::one(),
            }
        };
        assigned.push((profile, value));
    }
    ExtensionTable {
        values: assigned.into_iter().collect(),
    }
}

/// Check that a table's values respect every comparison the partial order
/// makes. Returns the violating profile pairs (greater-profile first).
pub fn verify_linear_extension<V: ExtensionValue>(
    table: &ExtensionTable<V>,
) -> (bool, Vec<(TieProfile, TieProfile)>) {
    let entries: Vec<(&TieProfile, &V)> = table.values.iter().collect();
    let mut violations = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let (p_i, v_i) = entries[i];
            let (p_j, v_j) = entries[j];
            match compare_profiles(p_i, p_j) {
                OrderRelation::Greater if v_i <= v_j => {
                    violations.push((p_i.clone(), p_j.clone()));
                }
                OrderRelation::Less if v_j <= v_i => {
                    violations.push((p_j.clone(), p_i.clone()));
                }
                _ => {}
            }
        }
    }
    (violations.is_empty(), violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::EventRecord;

    fn profile(sizes: &[u32]) -> TieProfile {
        TieProfile::new(sizes.to_vec()).unwrap()
    }

    fn ev(id: &str, people: &[&str]) -> EventRecord {
        EventRecord {
            event_id: id.into(),
            time: None,
            participants: people.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn compare_examples() {
        assert_eq!(
            compare_profiles(&profile(&[2, 3]), &profile(&[3])),
            OrderRelation::Greater
        );
        assert_eq!(
            compare_profiles(&profile(&[2]), &profile(&[3, 3])),
            OrderRelation::Incomparable
        );
        assert_eq!(
            compare_profiles(&profile(&[2, 5]), &profile(&[2, 5])),
            OrderRelation::Equal
        );
        assert_eq!(
            compare_profiles(&profile(&[]), &profile(&[4])),
            OrderRelation::Less
        );
    }

    #[test]
    fn unsorted_input_rejected() {
        assert!(matches!(
            compare_sorted_sizes(&[3, 2], &[2]),
            Err(OrderError::Unsorted(_))
        ));
        assert_eq!(
            compare_sorted_sizes(&[2, 3], &[3]).unwrap(),
            OrderRelation::Greater
        );
    }

    #[test]
    fn partial_order_laws_exhaustive() {
        // All profiles with entries in 2..=5 and length <= 3.
        let mut all = vec![profile(&[])];
        for a in 2..=5_u32 {
            all.push(profile(&[a]));
            for b in a..=5 {
                all.push(profile(&[a, b]));
                for c in b..=5 {
                    all.push(profile(&[a, b, c]));
                }
            }
        }
        for a in &all {
            assert_eq!(compare_profiles(a, a), OrderRelation::Equal);
            for b in &all {
                let ab = compare_profiles(a, b);
                assert_eq!(compare_profiles(b, a), ab.reverse(), "antisymmetry {a} {b}");
                for c in &all {
                    if ab == OrderRelation::Greater
                        && compare_profiles(b, c) == OrderRelation::Greater
                    {
                        assert_eq!(
                            compare_profiles(a, c),
                            OrderRelation::Greater,
                            "transitivity {a} {b} {c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn order_restates_frequency_and_intimacy() {
        // Appending an event, or shrinking one entry, moves strictly up.
        let base = profile(&[3, 4]);
        assert_eq!(
            compare_profiles(&profile(&[2, 3, 4]), &base),
            OrderRelation::Greater
        );
        assert_eq!(
            compare_profiles(&profile(&[2, 4]), &base),
            OrderRelation::Greater
        );
    }

    #[test]
    fn census_single_event_all_equal() {
        let g = build_graph(&[ev("P1", &["a", "b", "c"])]).unwrap();
        let census = incomparability_census(&g).unwrap();
        assert_eq!(census.total, 3);
        assert_eq!(census.count, 0);
        assert_eq!(census.percentage(), 0.0);
    }

    #[test]
    fn census_incomparable_pair() {
        // Profiles (2) and (3,3): neither dominates.
        let g = build_graph(&[
            ev("P1", &["u", "v"]),
            ev("P2", &["x", "y", "z"]),
            ev("P3", &["x", "y", "z"]),
        ])
        .unwrap();
        // Ties: (u,v) profile (2); (x,y),(x,z),(y,z) profile (3,3).
        let census = incomparability_census(&g).unwrap();
        assert_eq!(census.total, 6);
        assert_eq!(census.count, 3);
    }

    #[test]
    fn conflict_census_cases() {
        use crate::measures::{score_all, MeasureKind, MeasureSpec};

        // A profile-monotone measure never inverts the order.
        let g = build_graph(&[
            ev("P1", &["u", "v", "w"]),
            ev("P2", &["u", "v"]),
            ev("P3", &["w", "x"]),
        ])
        .unwrap();
        let scores = score_all::<f64>(&g, &MeasureSpec::new(MeasureKind::Delta).unwrap()).unwrap();
        let census = conflict_census(&g, &scores).unwrap();
        assert_eq!(census.conflicts, 0);

        // Preferential inverts (2) vs (3) when the (3)-tie's endpoints are
        // social: profile (2) dominates (3) but scores 1 versus 9.
        let g = build_graph(&[
            ev("P1", &["u", "v"]),
            ev("P2", &["x", "y", "z"]),
            ev("Q1", &["x", "a"]),
            ev("Q2", &["x", "b"]),
            ev("Q3", &["y", "c"]),
            ev("Q4", &["y", "d"]),
        ])
        .unwrap();
        let scores =
            score_all::<f64>(&g, &MeasureSpec::new(MeasureKind::Preferential).unwrap()).unwrap();
        assert_eq!(scores.get("u", "v"), 1.0);
        assert_eq!(scores.get("x", "y"), 9.0);
        let census = conflict_census(&g, &scores).unwrap();
        assert!(census.conflicts >= 1, "{census:?}");

        // Empty graph: nothing to conflict.
        let g = build_graph(&[]).unwrap();
        let scores = score_all::<f64>(&g, &MeasureSpec::new(MeasureKind::Delta).unwrap()).unwrap();
        let census = conflict_census(&g, &scores).unwrap();
        assert_eq!((census.total, census.conflicts), (0, 0));
    }

    #[test]
    fn conflict_census_rejects_missing_scores() {
        use crate::measures::{MeasureKind, MeasureSpec, TieScoreTable};
        let g = build_graph(&[ev("P1", &["u", "v"])]).unwrap();
        let empty: TieScoreTable<f64> =
            TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        assert!(matches!(
            conflict_census(&g, &empty),
            Err(OrderError::MissingScore(a, b)) if a == "u" && b == "v"
        ));
    }

    #[test]
    fn weak_disagreements_counted_separately() {
        use crate::measures::{MeasureKind, MeasureSpec, TieScoreTable};
        // (2,2) dominates (2) strictly, but both ties score the same.
        let g = build_graph(&[
            ev("P1", &["u", "v"]),
            ev("P2", &["u", "v"]),
            ev("P3", &["x", "y"]),
        ])
        .unwrap();
        let mut scores: TieScoreTable<f64> =
            TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        scores.insert("u", "v", 7.0);
        scores.insert("x", "y", 7.0);
        let census = conflict_census(&g, &scores).unwrap();
        assert_eq!(census.conflicts, 0);
        assert_eq!(census.weak_disagreements, 1);
    }

    #[test]
    fn extension_seeds() {
        let table: ExtensionTable<f64> =
            build_linear_extension([profile(&[]), profile(&[2])]);
        assert_eq!(table.value(&profile(&[])), Some(&0.0));
        assert_eq!(table.value(&profile(&[2])), Some(&1.0));
    }

    #[test]
    fn extension_dominating_profile_above_seed() {
        let table: ExtensionTable<f64> =
            build_linear_extension([profile(&[2]), profile(&[2, 2])]);
        assert!(*table.value(&profile(&[2, 2])).unwrap() > 1.0);
        assert!(verify_linear_extension(&table).0);
    }

    #[test]
    fn extension_without_seeds_still_valid() {
        let table: ExtensionTable<f64> =
            build_linear_extension([profile(&[2, 3]), profile(&[3, 3]), profile(&[2, 2, 4])]);
        assert!(verify_linear_extension(&table).0);
    }

    #[test]
    fn verify_detects_violation() {
        let mut values = BTreeMap::new();
        values.insert(profile(&[2]), 1.0);
        values.insert(profile(&[2, 2]), 0.5);
        let (ok, violations) = verify_linear_extension(&ExtensionTable::from_values(values));
        assert!(!ok);
        assert_eq!(
            violations,
            vec![(profile(&[2, 2]), profile(&[2]))]
        );
    }

    #[test]
    fn verify_empty_table() {
        let table: ExtensionTable<f64> = build_linear_extension([]);
        assert!(verify_linear_extension(&table).0);
    }
}
