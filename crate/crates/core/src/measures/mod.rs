//! The twelve tie-strength measures behind one uniform interface.
//!
//! Seven measures are closed-form per pair (Common Neighbors, Jaccard,
//! Delta, Adamic-Adar, Linear, Max, Preferential Attachment), Katz is a
//! truncated walk sum, and four are iterative (Random Walk with Restarts,
//! SimRank, Proportional, Temporal Proportional). The five measures that
//! conform to all axioms also expose their characterization as an
//! aggregator `g` over a per-event-size weight `h`.

mod fixpoint;
mod walk;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, GraphError, PersonRef, TieProfile};
use crate::scalar::Real;

pub use fixpoint::{
    proportional_residual, proportional_table, rwr_distribution, simrank_scores, temporal_table,
};
pub use walk::katz_vector;

/// Which tie-strength measure to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    Common,
    Jaccard,
    Delta,
    AdamicAdar,
    Linear,
    Preferential,
    Katz,
    RandomWalkRestart,
    SimRank,
    Max,
    Proportional,
    TemporalProportional,
}

impl MeasureKind {
    /// All twelve measures, in a stable order.
    pub fn all() -> [MeasureKind; 12] {
        use MeasureKind::*;
        [
            Common,
            Jaccard,
            Delta,
            AdamicAdar,
            Linear,
            Preferential,
            Katz,
            RandomWalkRestart,
            SimRank,
            Max,
            Proportional,
            TemporalProportional,
        ]
    }

    /// The eleven measures that do not need timestamps.
    pub fn non_temporal() -> [MeasureKind; 11] {
        use MeasureKind::*;
        [
            Common,
            Jaccard,
            Delta,
            AdamicAdar,
            Linear,
            Preferential,
            Katz,
            RandomWalkRestart,
            SimRank,
            Max,
            Proportional,
        ]
    }

    /// Fixed-point / power-iteration measures (converge to a tolerance).
    pub fn is_iterative(self) -> bool {
        matches!(
            self,
            Self::RandomWalkRestart | Self::SimRank | Self::Proportional | Self::TemporalProportional
        )
    }

    /// Measures whose per-pair value is directional before symmetrization.
    pub fn is_directed(self) -> bool {
        matches!(
            self,
            Self::RandomWalkRestart | Self::Proportional | Self::TemporalProportional
        )
    }

    pub fn requires_timestamps(self) -> bool {
        self == Self::TemporalProportional
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Common => "common",
            Self::Jaccard => "jaccard",
            Self::Delta => "delta",
            Self::AdamicAdar => "adamic-adar",
            Self::Linear => "linear",
            Self::Preferential => "preferential",
            Self::Katz => "katz",
            Self::RandomWalkRestart => "rwr",
            Self::SimRank => "simrank",
            Self::Max => "max",
            Self::Proportional => "proportional",
            Self::TemporalProportional => "temporal",
        }
    }
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = MeasureKind::all().iter().map(|k| k.name()).collect();
                format!("unknown measure {s:?} (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("parameter {name} = {value} out of range: must be {requirement}")]
    Parameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("{measure} did not converge within {iterations} iterations for {context}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NonConvergence {
        measure: MeasureKind,
        iterations: u32,
        residual: f64,
        tolerance: f64,
        context: String,
    },
    #[error("random-walk source {0:?} attends no event")]
    IsolatedSource(String),
    #[error("event {0:?} has no timestamp; the temporal measure needs one")]
    MissingTimestamp(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A measure plus its numeric parameters. Parameter ranges are enforced by
/// [`MeasureSpec::validated`], which every constructor goes through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    /// Walk decay base, > 1.
    pub katz_gamma: f64,
    /// Even truncation length of Katz walks, edges counted.
    pub katz_max_walk_length: u32,
    /// Restart probability, in (0,1).
    pub rwr_alpha: f64,
    /// SimRank decay, in (0,1).
    pub simrank_gamma: f64,
    /// Mixing weight of the proportional measures, in (0,1).
    pub epsilon: f64,
    /// Initial value of every directed temporal tie, > 0.
    pub temporal_init: f64,
    /// Convergence tolerance of the iterative measures.
    pub tolerance: f64,
    /// Iteration cap of the iterative measures.
    pub max_iterations: u32,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind) -> Result<Self, MeasureError> {
        MeasureSpec {
            kind,
            katz_gamma: 2.0,
            katz_max_walk_length: 6,
            rwr_alpha: 0.15,
            simrank_gamma: 0.8,
            epsilon: 0.5,
            temporal_init: 1e-6,
            tolerance: 1e-9,
            max_iterations: 1000,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, MeasureError> {
        fn check(
            ok: bool,
            name: &'static str,
            value: f64,
            requirement: &'static str,
        ) -> Result<(), MeasureError> {
            if ok {
                Ok(())
            } else {
                Err(MeasureError::Parameter {
                    name,
                    value,
                    requirement,
                })
            }
        }
        check(self.katz_gamma > 1.0, "katz_gamma", self.katz_gamma, "> 1")?;
        check(
            self.katz_max_walk_length >= 2 && self.katz_max_walk_length.is_multiple_of(2),
            "katz_max_walk_length",
            self.katz_max_walk_length as f64,
            "an even integer >= 2",
        )?;
        check(
            self.rwr_alpha > 0.0 && self.rwr_alpha < 1.0,
            "rwr_alpha",
            self.rwr_alpha,
            "in (0,1)",
        )?;
        check(
            self.simrank_gamma > 0.0 && self.simrank_gamma < 1.0,
            "simrank_gamma",
            self.simrank_gamma,
            "in (0,1)",
        )?;
        check(
            self.epsilon > 0.0 && self.epsilon < 1.0,
            "epsilon",
            self.epsilon,
            "in (0,1)",
        )?;
        check(
            self.temporal_init > 0.0,
            "temporal_init",
            self.temporal_init,
            "> 0",
        )?;
        check(self.tolerance > 0.0, "tolerance", self.tolerance, "> 0")?;
        check(
            self.max_iterations >= 1,
            "max_iterations",
            self.max_iterations as f64,
            ">= 1",
        )?;
        Ok(self)
    }

    /// Absolute tolerance under which two evaluations of this measure count
    /// as equal. Closed-form sums are exact to rounding; the truncated walk
    /// sum accumulates a little more; converged fixed points can differ by a
    /// small multiple of the iteration tolerance depending on when iteration
    /// stopped.
    pub fn comparison_epsilon(&self) -> f64 {
        if self.kind.is_iterative() {
            1e-6
        } else if self.kind == MeasureKind::Katz {
            1e-9
        } else {
            1e-12
        }
    }
}

/// Symmetric score table keyed by unordered person-label pairs. Pairs absent
/// from the table score 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TieScoreTable<S> {
    spec: MeasureSpec,
    scores: BTreeMap<(String, String), S>,
}

impl<S: Real> TieScoreTable<S> {
    pub fn new(spec: MeasureSpec) -> Self {
        Self {
            spec,
            scores: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_owned(), b.to_owned())
        } else {
            (b.to_owned(), a.to_owned())
        }
    }

    pub fn insert(&mut self, a: &str, b: &str, score: S) {
        self.scores.insert(Self::key(a, b), score);
    }

    pub fn get(&self, a: &str, b: &str) -> S {
        self.get_present(a, b).unwrap_or_else(S::zero)
    }

    pub fn get_present(&self, a: &str, b: &str) -> Option<S> {
        self.scores.get(&Self::key(a, b)).copied()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.scores.contains_key(&Self::key(a, b))
    }

    /// Entries ascending by label pair.
    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), S)> {
        self.scores.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Aggregator of per-event weights in the characterization `g(h(|P_1|),
/// ..., h(|P_k|))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Aggregator {
    Sum,
    Max,
}

/// Per-event-size weight `h` of a characterized measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventWeight {
    /// `h(n) = 1`
    One,
    /// `h(n) = 1 / C(n,2)`
    InverseChoose2,
    /// `h(n) = 1 / ln n`
    InverseLog,
    /// `h(n) = 1 / n`
    InverseSize,
}

/// The `(g, h)` form of a measure that satisfies all eight axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterizedMeasure {
    pub aggregator: Aggregator,
    pub weight: EventWeight,
}

impl CharacterizedMeasure {
    pub fn h<S: Real>(&self, event_size: u32) -> S {
        debug_assert!(event_size >= 2);
        let n = S::from_u32(event_size).expect("event size");
        match self.weight {
            EventWeight::One => S::one(),
            EventWeight::InverseChoose2 => {
                let pairs = S::from_u64(choose2(event_size as u64)).expect("pair count");
                S::one() / pairs
            }
            EventWeight::InverseLog => S::one() / n.ln(),
            EventWeight::InverseSize => S::one() / n,
        }
    }

    /// Apply `g` over `h` of each profile entry.
    pub fn apply<S: Real>(&self, profile: &TieProfile) -> S {
        let weights = profile.sizes().iter().map(|&n| self.h::<S>(n));
        match self.aggregator {
            Aggregator::Sum => weights.fold(S::zero(), |acc, w| acc + w),
            Aggregator::Max => weights.fold(S::zero(), S::max),
        }
    }

    /// Total tie strength a single event of size `k` generates:
    /// `f(k) = C(k,2) * h(k)` for sums, and the same under max since every
    /// pair at the event carries `h(k)`.
    pub fn single_event_total<S: Real>(&self, k: u32) -> S {
        let pairs = S::from_u64(choose2(k as u64)).expect("pair count");
        pairs * self.h::<S>(k)
    }
}

pub(crate) fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// The `(g, h)` pair for measures the characterization covers; `None` for
/// the rest.
pub fn characterized_form(kind: MeasureKind) -> Option<CharacterizedMeasure> {
    use {Aggregator::*, EventWeight::*};
    let (aggregator, weight) = match kind {
        MeasureKind::Common => (Sum, One),
        MeasureKind::Delta => (Sum, InverseChoose2),
        MeasureKind::AdamicAdar => (Sum, InverseLog),
        MeasureKind::Linear => (Sum, InverseSize),
        MeasureKind::Max => (Max, InverseSize),
        _ => return None,
    };
    Some(CharacterizedMeasure { aggregator, weight })
}

/// Total number of common events.
pub fn score_common<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    Ok(S::from_usize_exact(g.common_events(u, v)?.len()))
}

/// Common events over the union of both event sets; 0 when the union is
/// empty.
pub fn score_jaccard<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    let common = g.common_events(u, v)?.len();
    let union = g.events_of(u)?.len() + g.events_of(v)?.len() - common;
    if union == 0 {
        Ok(S::zero())
    } else {
        Ok(S::from_usize_exact(common) / S::from_usize_exact(union))
    }
}

fn sum_over_common<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
    weight: impl Fn(u64) -> S,
) -> Result<S, MeasureError> {
    // Summing in ascending size order keeps the result bit-identical to the
    // aggregator applied over the tie profile.
    let mut sizes: Vec<usize> = g
        .common_events(u, v)?
        .into_iter()
        .map(|e| g.event_size(e))
        .collect();
    sizes.sort_unstable();
    Ok(sizes
        .into_iter()
        .map(|n| weight(n as u64))
        .fold(S::zero(), |acc, w| acc + w))
}

/// Sum of `1 / C(|P|,2)` over common events.
pub fn score_delta<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    sum_over_common(g, u, v, |n| {
        S::one() / S::from_u64(choose2(n)).expect("pair count")
    })
}

/// Sum of `1 / ln |P|` over common events (natural log).
pub fn score_adamic_adar<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    sum_over_common(g, u, v, |n| {
        S::one() / S::from_u64(n).expect("event size").ln()
    })
}

/// Sum of `1 / |P|` over common events.
pub fn score_linear<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    sum_over_common(g, u, v, |n| S::one() / S::from_u64(n).expect("event size"))
}

/// Largest `1 / |P|` over common events; 0 without any.
pub fn score_max<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    Ok(g.common_events(u, v)?
        .into_iter()
        .map(|e| S::one() / S::from_usize_exact(g.event_size(e)))
        .fold(S::zero(), S::max))
}

/// Product of the two event-list sizes.
pub fn score_preferential<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    g.common_events(u, v)?; // validates the pair
    Ok(S::from_usize_exact(g.events_of(u)?.len()) * S::from_usize_exact(g.events_of(v)?.len()))
}

/// Discounted count of walks between `u` and `v` of even length up to the
/// truncation length.
pub fn score_katz<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
    spec: &MeasureSpec,
) -> Result<S, MeasureError> {
    g.common_events(u, v)?; // validates the pair
    Ok(katz_vector::<S>(g, u, spec)?[v.0 as usize])
}

/// Stationary probability of `v` under the restart walk anchored at `u`.
/// Directional: `score_rwr(g, u, v)` and `score_rwr(g, v, u)` differ in
/// general.
pub fn score_rwr<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
    spec: &MeasureSpec,
) -> Result<S, MeasureError> {
    g.common_events(u, v)?; // validates the pair
    Ok(rwr_distribution::<S>(g, u, spec)?[v.0 as usize])
}

/// SimRank similarity of two people under the bipartite neighbor recursion.
pub fn score_simrank<S: Real>(
    g: &BipartiteGraph,
    u: PersonRef,
    v: PersonRef,
    spec: &MeasureSpec,
) -> Result<S, MeasureError> {
    if u == v {
        return Ok(S::one());
    }
    g.common_events(u, v)?; // validates the pair
    let sims = simrank_scores::<S>(g, spec)?;
    Ok(sims.people[u.0 as usize][v.0 as usize])
}

/// Fixed point of the proportional-attention equations, symmetrized by
/// averaging the two directed values. Covers exactly the graph's ties.
pub fn score_proportional<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<TieScoreTable<S>, MeasureError> {
    let directed = proportional_table::<S>(g, spec)?;
    Ok(symmetrize_directed(g, spec, &directed))
}

/// Event-by-event temporal update, symmetrized by averaging. Covers exactly
/// the pairs that co-attended at least one event.
pub fn score_temporal<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<TieScoreTable<S>, MeasureError> {
    let directed = temporal_table::<S>(g, spec)?;
    Ok(symmetrize_directed(g, spec, &directed))
}

fn symmetrize_directed<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
    directed: &BTreeMap<(PersonRef, PersonRef), S>,
) -> TieScoreTable<S> {
    let mut table = TieScoreTable::new(spec.clone());
    let half = S::from_f64_exact(0.5);
    for (&(u, v), &forward) in directed {
        if u < v {
            let backward = directed.get(&(v, u)).copied().unwrap_or_else(S::zero);
            table.insert(
                g.person_label(u),
                g.person_label(v),
                (forward + backward) * half,
            );
        }
    }
    table
}

/// Score every tie of the graph under the given measure. Directed measures
/// are symmetrized by averaging the two directions.
pub fn score_all<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<TieScoreTable<S>, MeasureError> {
    score_pairs(g, spec, &g.all_ties())
}

/// Score an explicit set of unordered pairs. Shared walk and fixed-point
/// state is computed once per graph, not per pair.
pub fn score_pairs<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
    pairs: &[(PersonRef, PersonRef)],
) -> Result<TieScoreTable<S>, MeasureError> {
    use MeasureKind::*;
    let mut table = TieScoreTable::new(spec.clone());
    let half = S::from_f64_exact(0.5);
    match spec.kind {
        Common | Jaccard | Delta | AdamicAdar | Linear | Max | Preferential => {
            type Scored<S> = Result<((PersonRef, PersonRef), S), MeasureError>;
            let scored: Vec<Scored<S>> = pairs
                .par_iter()
                .map(|&(u, v)| Ok(((u, v), closed_form_score(g, spec.kind, u, v)?)))
                .collect();
            for entry in scored {
                let ((u, v), s) = entry?;
                table.insert(g.person_label(u), g.person_label(v), s);
            }
        }
        Katz => {
            // One walk accumulation per distinct left endpoint.
            let mut by_source: BTreeMap<PersonRef, Vec<PersonRef>> = BTreeMap::new();
            for &(u, v) in pairs {
                by_source.entry(u).or_default().push(v);
            }
            for (u, targets) in by_source {
                let walk = katz_vector::<S>(g, u, spec)?;
                for v in targets {
                    table.insert(g.person_label(u), g.person_label(v), walk[v.0 as usize]);
                }
            }
        }
        RandomWalkRestart => {
            let mut distributions: BTreeMap<PersonRef, Vec<S>> = BTreeMap::new();
            for &(u, v) in pairs {
                for p in [u, v] {
                    if let std::collections::btree_map::Entry::Vacant(slot) =
                        distributions.entry(p)
                    {
                        slot.insert(rwr_distribution::<S>(g, p, spec)?);
                    }
                }
            }
            for &(u, v) in pairs {
                let forward = distributions[&u][v.0 as usize];
                let backward = distributions[&v][u.0 as usize];
                table.insert(
                    g.person_label(u),
                    g.person_label(v),
                    (forward + backward) * half,
                );
            }
        }
        SimRank => {
            let sims = simrank_scores::<S>(g, spec)?;
            for &(u, v) in pairs {
                table.insert(
                    g.person_label(u),
                    g.person_label(v),
                    sims.people[u.0 as usize][v.0 as usize],
                );
            }
        }
        Proportional | TemporalProportional => {
            let directed = if spec.kind == Proportional {
                proportional_table::<S>(g, spec)?
            } else {
                temporal_table::<S>(g, spec)?
            };
            for &(u, v) in pairs {
                g.common_events(u, v)?; // validates the pair
                let forward = directed.get(&(u, v)).copied().unwrap_or_else(S::zero);
                let backward = directed.get(&(v, u)).copied().unwrap_or_else(S::zero);
                table.insert(
                    g.person_label(u),
                    g.person_label(v),
                    (forward + backward) * half,
                );
            }
        }
    }
    Ok(table)
}

fn closed_form_score<S: Real>(
    g: &BipartiteGraph,
    kind: MeasureKind,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    match kind {
        MeasureKind::Common => score_common(g, u, v),
        MeasureKind::Jaccard => score_jaccard(g, u, v),
        MeasureKind::Delta => score_delta(g, u, v),
        MeasureKind::AdamicAdar => score_adamic_adar(g, u, v),
        MeasureKind::Linear => score_linear(g, u, v),
        MeasureKind::Max => score_max(g, u, v),
        MeasureKind::Preferential => score_preferential(g, u, v),
        other => unreachable!("{other} is not closed-form"),
    }
}

/// One symmetric value for an arbitrary pair: the measure's own value for
/// symmetric measures, the average of the two directions for directed ones.
pub fn canonical_pair_score<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
    u: PersonRef,
    v: PersonRef,
) -> Result<S, MeasureError> {
    use MeasureKind::*;
    match spec.kind {
        Common | Jaccard | Delta | AdamicAdar | Linear | Max | Preferential => {
            closed_form_score(g, spec.kind, u, v)
        }
        Katz => score_katz(g, u, v, spec),
        SimRank => score_simrank(g, u, v, spec),
        RandomWalkRestart => {
            let forward: S = score_rwr(g, u, v, spec)?;
            let backward: S = score_rwr(g, v, u, spec)?;
            Ok((forward + backward) * S::from_f64_exact(0.5))
        }
        Proportional => {
            g.common_events(u, v)?;
            Ok(score_proportional::<S>(g, spec)?.get(g.person_label(u), g.person_label(v)))
        }
        TemporalProportional => {
            g.common_events(u, v)?;
            Ok(score_temporal::<S>(g, spec)?.get(g.person_label(u), g.person_label(v)))
        }
    }
}

/// Tie strength from `u`'s perspective to every other person, indexed by
/// person. For directed measures this is the raw `u -> v` value.
pub fn directed_scores_from<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
    u: PersonRef,
) -> Result<Vec<(PersonRef, S)>, MeasureError> {
    use MeasureKind::*;
    let others: Vec<PersonRef> = g.people().filter(|&p| p != u).collect();
    match spec.kind {
        Common | Jaccard | Delta | AdamicAdar | Linear | Max | Preferential => others
            .into_iter()
            .map(|v| Ok((v, closed_form_score(g, spec.kind, u, v)?)))
            .collect(),
        Katz => {
            let walk = katz_vector::<S>(g, u, spec)?;
            Ok(others.into_iter().map(|v| (v, walk[v.0 as usize])).collect())
        }
        RandomWalkRestart => {
            let pi = rwr_distribution::<S>(g, u, spec)?;
            Ok(others.into_iter().map(|v| (v, pi[v.0 as usize])).collect())
        }
        SimRank => {
            let sims = simrank_scores::<S>(g, spec)?;
            Ok(others
                .into_iter()
                .map(|v| (v, sims.people[u.0 as usize][v.0 as usize]))
                .collect())
        }
        Proportional => {
            let directed = proportional_table::<S>(g, spec)?;
            Ok(others
                .into_iter()
                .map(|v| (v, directed.get(&(u, v)).copied().unwrap_or_else(S::zero)))
                .collect())
        }
        TemporalProportional => {
            let directed = temporal_table::<S>(g, spec)?;
            Ok(others
                .into_iter()
                .map(|v| (v, directed.get(&(u, v)).copied().unwrap_or_else(S::zero)))
                .collect())
        }
    }
}
