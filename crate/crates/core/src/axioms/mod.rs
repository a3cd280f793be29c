//! Machine-checking of the eight tie-strength axioms against any measure.
//!
//! Each axiom becomes a randomized perturbation test: build a graph, apply
//! the axiom's perturbation, and compare scores. A violation always carries
//! a replayable [`Witness`]. Passing a bounded number of trials proves
//! nothing by itself; for the characterized measures the exact
//! profile-oracle equivalence supplies the constructive guarantee.

mod sampler;
mod witness;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::GraphError;
use crate::ingest::EventRecord;
use crate::measures::{
    canonical_pair_score, characterized_form, choose2, directed_scores_from, MeasureError,
    MeasureKind, MeasureSpec,
};

pub use sampler::{choose_distinct, GraphSampler, GraphSpec};
pub use witness::{A7Observation, DependenceKind, EventChange, Witness};

/// The eight axioms, in their canonical order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum AxiomId {
    Isomorphism,
    Baseline,
    Frequency,
    Intimacy,
    LargerEventsMoreTies,
    VertexIndependence,
    EventIndependence,
    Submodularity,
}

impl AxiomId {
    pub fn all() -> [AxiomId; 8] {
        use AxiomId::*;
        [
            Isomorphism,
            Baseline,
            Frequency,
            Intimacy,
            LargerEventsMoreTies,
            VertexIndependence,
            EventIndependence,
            Submodularity,
        ]
    }

    pub fn code(self) -> &'static str {
        match self {
            Self::Isomorphism => "A1",
            Self::Baseline => "A2",
            Self::Frequency => "A3",
            Self::Intimacy => "A4",
            Self::LargerEventsMoreTies => "A5",
            Self::VertexIndependence => "A6",
            Self::EventIndependence => "A7",
            Self::Submodularity => "A8",
        }
    }

    fn stream(self) -> u64 {
        1 + AxiomId::all().iter().position(|a| *a == self).unwrap() as u64
    }
}

impl std::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// How the baseline axiom's two-person anchor is read: exactly 1, or merely
/// positive (scale-tolerant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum A2Mode {
    Strict,
    Positive,
}

impl std::str::FromStr for A2Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Self::Strict),
            "positive" => Ok(Self::Positive),
            other => Err(format!("unknown a2 mode {other:?} (expected strict or positive)")),
        }
    }
}

/// Outcome of checking one axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// No violation found. `trials` ran to completion; `skipped` trials
    /// could not evaluate the measure (e.g. non-convergence) and count as
    /// neither pass nor violation.
    Pass { trials: u32, skipped: u32 },
    Violated { witness: Box<Witness> },
    /// Every trial failed to evaluate.
    Inapplicable { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Violated { witness } => Some(witness),
            _ => None,
        }
    }

    fn mark(&self) -> &'static str {
        match self {
            Verdict::Pass { .. } => "pass",
            Verdict::Violated { .. } => "FAIL",
            Verdict::Inapplicable { .. } => "n/a",
        }
    }
}

/// Full per-measure report: one verdict per axiom, with the baseline axiom
/// additionally evaluated in both modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub measure: MeasureSpec,
    pub sampler: GraphSampler,
    pub trials: u32,
    pub a2_mode: A2Mode,
    pub entries: Vec<(AxiomId, Verdict)>,
    pub a2_strict: Verdict,
    pub a2_positive: Verdict,
}

impl AxiomReport {
    pub fn verdict(&self, axiom: AxiomId) -> &Verdict {
        &self
            .entries
            .iter()
            .find(|(a, _)| *a == axiom)
            .expect("all axioms present")
            .1
    }

    /// One classification-table-style line.
    pub fn table_row(&self) -> String {
        let cells: Vec<String> = self
            .entries
            .iter()
            .map(|(axiom, verdict)| format!("{}:{}", axiom.code(), verdict.mark()))
            .collect();
        format!(
            "{:<12} {}  [A2 strict:{} positive:{}]",
            self.measure.kind.name(),
            cells.join(" "),
            self.a2_strict.mark(),
            self.a2_positive.mark()
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Where trial graphs come from: the sampler, or one fixed input graph.
#[derive(Debug, Clone)]
enum GraphSource {
    Random,
    Fixed(GraphSpec),
}

/// Perturbation-based conformance checker for one measure.
#[derive(Debug, Clone)]
pub struct AxiomChecker {
    measure: MeasureSpec,
    sampler: GraphSampler,
    a2_mode: A2Mode,
    source: GraphSource,
}

/// Run `trials` perturbation tests of one axiom.
pub fn check_axiom(
    axiom: AxiomId,
    measure: &MeasureSpec,
    sampler: &GraphSampler,
    trials: u32,
) -> Verdict {
    AxiomChecker::new(measure.clone(), *sampler).check(axiom, trials)
}

/// Check all eight axioms.
pub fn check_all_axioms(measure: &MeasureSpec, sampler: &GraphSampler, trials: u32) -> AxiomReport {
    AxiomChecker::new(measure.clone(), *sampler).check_all(trials)
}

/// Search up to `budget` instances for a violation and shrink the first hit.
pub fn find_counterexample(
    axiom: AxiomId,
    measure: &MeasureSpec,
    sampler: &GraphSampler,
    budget: u32,
) -> Option<Witness> {
    AxiomChecker::new(measure.clone(), *sampler).find_counterexample(axiom, budget)
}

impl AxiomChecker {
    pub fn new(measure: MeasureSpec, sampler: GraphSampler) -> Self {
        Self {
            measure,
            sampler,
            a2_mode: A2Mode::Positive,
            source: GraphSource::Random,
        }
    }

    pub fn with_a2_mode(mut self, mode: A2Mode) -> Self {
        self.a2_mode = mode;
        self
    }

    /// Perturb the given graph in every trial instead of sampling.
    pub fn with_fixed_graph(mut self, graph: GraphSpec) -> Self {
        self.source = GraphSource::Fixed(graph);
        self
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    fn epsilon(&self) -> f64 {
        self.measure.comparison_epsilon()
    }

    pub fn check(&self, axiom: AxiomId, trials: u32) -> Verdict {
        match axiom {
            AxiomId::Baseline => self.check_baseline(self.a2_mode),
            AxiomId::EventIndependence => self.check_event_independence(trials),
            _ => {
                let mut skipped = 0;
                let mut last_error = String::new();
                for trial in 0..trials {
                    let mut rng = self.sampler.rng(axiom.stream(), trial as u64);
                    match self.run_trial(axiom, &mut rng) {
                        Ok(None) => {}
                        Ok(Some(witness)) => {
                            return Verdict::Violated {
                                witness: Box::new(witness),
                            }
                        }
                        Err(e) => {
                            skipped += 1;
                            last_error = e.to_string();
                        }
                    }
                }
                if skipped == trials {
                    Verdict::Inapplicable { reason: last_error }
                } else {
                    Verdict::Pass {
                        trials: trials - skipped,
                        skipped,
                    }
                }
            }
        }
    }

    pub fn check_all(&self, trials: u32) -> AxiomReport {
        let entries = AxiomId::all()
            .into_iter()
            .map(|axiom| (axiom, self.check(axiom, trials)))
            .collect();
        AxiomReport {
            measure: self.measure.clone(),
            sampler: self.sampler,
            trials,
            a2_mode: self.a2_mode,
            entries,
            a2_strict: self.check_baseline(A2Mode::Strict),
            a2_positive: self.check_baseline(A2Mode::Positive),
        }
    }

    pub fn find_counterexample(&self, axiom: AxiomId, budget: u32) -> Option<Witness> {
        match axiom {
            AxiomId::Baseline => self.check_baseline(self.a2_mode).witness().cloned(),
            AxiomId::EventIndependence => {
                self.check_event_independence(budget).witness().cloned()
            }
            _ => {
                for trial in 0..budget {
                    let mut rng = self.sampler.rng(axiom.stream(), trial as u64);
                    if let Ok(Some(witness)) = self.run_trial(axiom, &mut rng) {
                        return Some(self.shrink(witness));
                    }
                }
                None
            }
        }
    }

    /// Re-run the stored instance. `Ok(Some(_))` carries freshly observed
    /// values; `Ok(None)` means the instance no longer violates.
    pub fn recheck(&self, witness: &Witness) -> Result<Option<Witness>, MeasureError> {
        match witness {
            Witness::LabelDependence {
                graph,
                pair,
                relabel_seed,
                ..
            } => self.eval_isomorphism(graph, pair, *relabel_seed),
            Witness::BaselineMismatch { mode, .. } => {
                Ok(self.check_baseline(*mode).witness().cloned())
            }
            Witness::FrequencyDecrease {
                graph,
                pair,
                added_event,
                ..
            } => self.eval_frequency(graph, pair, added_event),
            Witness::IntimacyDecrease {
                graph,
                pair,
                event_id,
                removed,
                ..
            } => self.eval_intimacy(graph, pair, event_id, removed),
            Witness::EventTotalsOutOfOrder {
                larger, smaller, ..
            } => self.eval_event_totals(*larger, *smaller),
            Witness::VertexDependence {
                graph,
                person,
                change,
                ..
            } => self.eval_vertex_independence(graph, person, change),
            Witness::EventDependence { first, second, .. } => {
                let first = self.observe_addition(&first.graph, &first.pair, &first.added_event)?;
                let second =
                    self.observe_addition(&second.graph, &second.pair, &second.added_event)?;
                Ok(self.dependence_violation(&first, &second))
            }
            Witness::Superadditive {
                graph, pair, event, ..
            } => self.eval_submodularity(graph, pair, event),
        }
    }

    /// True iff re-running the stored instance reproduces the violation with
    /// bit-identical observed values.
    pub fn replay(&self, witness: &Witness) -> bool {
        match self.recheck(witness) {
            Ok(Some(again)) => {
                serde_json::to_string(&again).expect("witness serializes")
                    == serde_json::to_string(witness).expect("witness serializes")
            }
            _ => false,
        }
    }

    fn trial_graph(&self, rng: &mut ChaCha8Rng) -> GraphSpec {
        match &self.source {
            GraphSource::Random => self.sampler.sample(rng),
            GraphSource::Fixed(spec) => spec.clone(),
        }
    }

    fn run_trial(
        &self,
        axiom: AxiomId,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Witness>, MeasureError> {
        match axiom {
            AxiomId::Isomorphism => {
                let graph = self.trial_graph(rng);
                let pair = pick_pair(&graph, rng)?;
                let relabel_seed = rng.gen();
                self.eval_isomorphism(&graph, &pair, relabel_seed)
            }
            AxiomId::Frequency => {
                let graph = self.trial_graph(rng);
                let pair = pick_pair(&graph, rng)?;
                let event = new_common_event(&graph, &pair, rng, self.sampler.max_event_size);
                self.eval_frequency(&graph, &pair, &event)
            }
            AxiomId::Intimacy => {
                let mut graph = self.trial_graph(rng);
                let pair = pick_pair(&graph, rng)?;
                let (event_id, removed) =
                    pick_removable_attendee(&mut graph, &pair, rng, self.sampler.max_event_size)?;
                self.eval_intimacy(&graph, &pair, &event_id, &removed)
            }
            AxiomId::LargerEventsMoreTies => {
                let top = self.sampler.max_event_size.max(2) as u32;
                let smaller = rng.gen_range(2..=top);
                let larger = rng.gen_range(smaller..=top);
                self.eval_event_totals(larger, smaller)
            }
            AxiomId::VertexIndependence => {
                let graph = self.trial_graph(rng);
                if graph.people.len() < 2 {
                    return Err(GraphError::UnknownPersonLabel("<need 2 people>".into()).into());
                }
                let person = graph.people[rng.gen_range(0..graph.people.len())].clone();
                let change = pick_event_change(&graph, &person, rng, self.sampler.max_event_size);
                self.eval_vertex_independence(&graph, &person, &change)
            }
            AxiomId::Submodularity => {
                let graph = self.trial_graph(rng);
                let pair = pick_pair(&graph, rng)?;
                let event = new_common_event(&graph, &pair, rng, self.sampler.max_event_size);
                self.eval_submodularity(&graph, &pair, &event)
            }
            AxiomId::Baseline | AxiomId::EventIndependence => {
                unreachable!("handled by dedicated checks")
            }
        }
    }

    fn score(&self, graph: &GraphSpec, pair: &(String, String)) -> Result<f64, MeasureError> {
        let g = graph.to_graph()?;
        let u = g
            .person(&pair.0)
            .ok_or_else(|| GraphError::UnknownPersonLabel(pair.0.clone()))?;
        let v = g
            .person(&pair.1)
            .ok_or_else(|| GraphError::UnknownPersonLabel(pair.1.clone()))?;
        canonical_pair_score::<f64>(&g, &self.measure, u, v)
    }

    fn eval_isomorphism(
        &self,
        graph: &GraphSpec,
        pair: &(String, String),
        relabel_seed: u64,
    ) -> Result<Option<Witness>, MeasureError> {
        let (relabeled, mapping) = relabel(graph, relabel_seed);
        let mapped_pair = (mapping[&pair.0].clone(), mapping[&pair.1].clone());
        let original = self.score(graph, pair)?;
        let image = self.score(&relabeled, &mapped_pair)?;
        if (original - image).abs() > self.epsilon() {
            Ok(Some(Witness::LabelDependence {
                graph: graph.clone(),
                pair: pair.clone(),
                relabel_seed,
                mapped_pair,
                original,
                relabeled: image,
            }))
        } else {
            Ok(None)
        }
    }

    fn check_baseline(&self, mode: A2Mode) -> Verdict {
        let eps = self.epsilon();
        let people = vec!["x0".to_owned(), "x1".to_owned()];
        let empty = GraphSpec {
            people: people.clone(),
            events: vec![],
        };
        let single = GraphSpec {
            people: people.clone(),
            events: vec![EventRecord {
                event_id: "e0".into(),
                time: Some(0),
                participants: people,
            }],
        };
        let pair = ("x0".to_owned(), "x1".to_owned());
        let empty_value = self.score(&empty, &pair).ok();
        let single_value = self.score(&single, &pair).ok();
        let empty_bad = empty_value.map(|v| v.abs() > eps);
        let single_bad = single_value.map(|v| match mode {
            A2Mode::Strict => (v - 1.0).abs() > eps,
            A2Mode::Positive => v <= eps,
        });
        if empty_bad == Some(true) || single_bad == Some(true) {
            return Verdict::Violated {
                witness: Box::new(Witness::BaselineMismatch {
                    mode,
                    empty_value,
                    single_event_value: single_value,
                }),
            };
        }
        let ran = [empty_bad, single_bad]
            .iter()
            .filter(|b| b.is_some())
            .count() as u32;
        if ran == 0 {
            Verdict::Inapplicable {
                reason: "measure evaluates on neither baseline graph".into(),
            }
        } else {
            Verdict::Pass {
                trials: ran,
                skipped: 2 - ran,
            }
        }
    }

    fn eval_frequency(
        &self,
        graph: &GraphSpec,
        pair: &(String, String),
        added_event: &EventRecord,
    ) -> Result<Option<Witness>, MeasureError> {
        let before = self.score(graph, pair)?;
        let mut extended = graph.clone();
        extended.events.push(added_event.clone());
        let after = self.score(&extended, pair)?;
        if after < before - self.epsilon() {
            Ok(Some(Witness::FrequencyDecrease {
                graph: graph.clone(),
                pair: pair.clone(),
                added_event: added_event.clone(),
                before,
                after,
            }))
        } else {
            Ok(None)
        }
    }

    fn eval_intimacy(
        &self,
        graph: &GraphSpec,
        pair: &(String, String),
        event_id: &str,
        removed: &str,
    ) -> Result<Option<Witness>, MeasureError> {
        let position = graph
            .events
            .iter()
            .position(|e| e.event_id == event_id)
            .ok_or_else(|| GraphError::UnknownPersonLabel(format!("<event {event_id}>")))?;
        let event = &graph.events[position];
        if !event.participants.iter().any(|p| p == removed)
            || removed == pair.0
            || removed == pair.1
        {
            return Ok(None);
        }
        let before = self.score(graph, pair)?;
        let mut smaller = graph.clone();
        smaller.events[position].participants.retain(|p| p != removed);
        let after = self.score(&smaller, pair)?;
        if after < before - self.epsilon() {
            Ok(Some(Witness::IntimacyDecrease {
                graph: graph.clone(),
                pair: pair.clone(),
                event_id: event_id.to_owned(),
                removed: removed.to_owned(),
                before,
                after,
            }))
        } else {
            Ok(None)
        }
    }

    fn eval_event_totals(
        &self,
        larger: u32,
        smaller: u32,
    ) -> Result<Option<Witness>, MeasureError> {
        let larger_total = self.single_event_total(larger)?;
        let smaller_total = self.single_event_total(smaller)?;
        if larger_total < smaller_total - self.epsilon() {
            Ok(Some(Witness::EventTotalsOutOfOrder {
                larger,
                smaller,
                larger_total,
                smaller_total,
            }))
        } else {
            Ok(None)
        }
    }

    /// Total symmetric tie strength over all pairs of a single size-`k`
    /// event.
    fn single_event_total(&self, k: u32) -> Result<f64, MeasureError> {
        let people: Vec<String> = (0..k).map(|i| format!("q{i}")).collect();
        let graph = GraphSpec {
            people: people.clone(),
            events: vec![EventRecord {
                event_id: "e0".into(),
                time: Some(0),
                participants: people.clone(),
            }],
        };
        let mut total = 0.0;
        for i in 0..people.len() {
            for j in i + 1..people.len() {
                total += self.score(&graph, &(people[i].clone(), people[j].clone()))?;
            }
        }
        Ok(total)
    }

    fn eval_vertex_independence(
        &self,
        graph: &GraphSpec,
        person: &str,
        change: &EventChange,
    ) -> Result<Option<Witness>, MeasureError> {
        let changed = match change {
            EventChange::Add(event) => {
                if event.participants.iter().any(|p| p == person) {
                    return Ok(None);
                }
                let mut out = graph.clone();
                out.events.push(event.clone());
                out
            }
            EventChange::Delete(event_id) => {
                let Some(position) = graph.events.iter().position(|e| &e.event_id == event_id)
                else {
                    return Ok(None);
                };
                if graph.events[position].participants.iter().any(|p| p == person) {
                    return Ok(None);
                }
                graph.without_event(position)
            }
        };
        let row_before = self.perspective_row(graph, person)?;
        let row_after = self.perspective_row(&changed, person)?;
        let eps = self.epsilon();
        for (other, before) in &row_before {
            if let Some(after) = row_after.get(other) {
                if (before - after).abs() > eps {
                    return Ok(Some(Witness::VertexDependence {
                        graph: graph.clone(),
                        person: person.to_owned(),
                        change: change.clone(),
                        other: other.clone(),
                        before: *before,
                        after: *after,
                    }));
                }
            }
        }
        Ok(None)
    }

    fn perspective_row(
        &self,
        graph: &GraphSpec,
        person: &str,
    ) -> Result<BTreeMap<String, f64>, MeasureError> {
        let g = graph.to_graph()?;
        let u = g
            .person(person)
            .ok_or_else(|| GraphError::UnknownPersonLabel(person.to_owned()))?;
        let row = directed_scores_from::<f64>(&g, &self.measure, u)?;
        Ok(row
            .into_iter()
            .map(|(v, s)| (g.person_label(v).to_owned(), s))
            .collect())
    }

    fn check_event_independence(&self, trials: u32) -> Verdict {
        let mut observations: Vec<A7Observation> = Vec::new();
        let mut skipped = 0;
        let mut last_error = String::new();
        for trial in 0..trials {
            let mut rng = self.sampler.rng(AxiomId::EventIndependence.stream(), trial as u64);
            let graph = self.trial_graph(&mut rng);
            let pair = match pick_pair(&graph, &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    skipped += 1;
                    last_error = e.to_string();
                    continue;
                }
            };
            let event = new_common_event(&graph, &pair, &mut rng, self.sampler.max_event_size);
            match self.observe_addition(&graph, &pair, &event) {
                Ok(obs) => observations.push(obs),
                Err(e) => {
                    skipped += 1;
                    last_error = e.to_string();
                }
            }
        }
        if observations.is_empty() {
            return Verdict::Inapplicable { reason: last_error };
        }
        for i in 0..observations.len() {
            for j in i + 1..observations.len() {
                if let Some(witness) =
                    self.dependence_violation(&observations[i], &observations[j])
                {
                    return Verdict::Violated {
                        witness: Box::new(witness),
                    };
                }
            }
        }
        Verdict::Pass {
            trials: observations.len() as u32,
            skipped,
        }
    }

    fn observe_addition(
        &self,
        graph: &GraphSpec,
        pair: &(String, String),
        event: &EventRecord,
    ) -> Result<A7Observation, MeasureError> {
        let existing = self.score(graph, pair)?;
        let mut extended = graph.clone();
        extended.events.push(event.clone());
        let updated = self.score(&extended, pair)?;
        Ok(A7Observation {
            graph: graph.clone(),
            pair: pair.clone(),
            added_event: event.clone(),
            existing,
            updated,
        })
    }

    /// The observational falsifier: an update rule `g(existing, h(|P|))`
    /// must map equal keys to equal outputs and be monotone in the existing
    /// strength. Keys round the existing strength at 1e-9.
    fn dependence_violation(
        &self,
        a: &A7Observation,
        b: &A7Observation,
    ) -> Option<Witness> {
        if a.added_event.participants.len() != b.added_event.participants.len() {
            return None;
        }
        let eps = self.epsilon();
        let key = |obs: &A7Observation| (obs.existing / 1e-9).round() as i64;
        let (lo, hi) = if key(a) <= key(b) { (a, b) } else { (b, a) };
        if key(lo) == key(hi) {
            // Inputs sharing a key can still differ by the rounding width, so
            // a Lipschitz-1 update legitimately moves outputs that much.
            if (lo.updated - hi.updated).abs() > 1e-9 + eps {
                return Some(Witness::EventDependence {
                    kind: DependenceKind::Inconsistent,
                    first: lo.clone(),
                    second: hi.clone(),
                });
            }
        } else if lo.updated > hi.updated + eps {
            return Some(Witness::EventDependence {
                kind: DependenceKind::NonMonotone,
                first: lo.clone(),
                second: hi.clone(),
            });
        }
        None
    }

    fn eval_submodularity(
        &self,
        graph: &GraphSpec,
        pair: &(String, String),
        event: &EventRecord,
    ) -> Result<Option<Witness>, MeasureError> {
        let base = self.score(graph, pair)?;
        let standalone_graph = GraphSpec {
            people: event.participants.clone(),
            events: vec![event.clone()],
        };
        let standalone = self.score(&standalone_graph, pair)?;
        let mut extended = graph.clone();
        extended.events.push(event.clone());
        let combined = self.score(&extended, pair)?;
        if combined > base + standalone + self.epsilon() {
            Ok(Some(Witness::Superadditive {
                graph: graph.clone(),
                pair: pair.clone(),
                event: event.clone(),
                base,
                standalone,
                combined,
            }))
        } else {
            Ok(None)
        }
    }

    /// Greedy minimization: drop events, then people, as long as the
    /// violation persists.
    fn shrink(&self, mut witness: Witness) -> Witness {
        let mut budget = 400;
        loop {
            let mut improved = false;
            for candidate in shrink_candidates(&witness) {
                if budget == 0 {
                    return witness;
                }
                budget -= 1;
                if let Ok(Some(smaller)) = self.recheck(&candidate) {
                    witness = smaller;
                    improved = true;
                    break;
                }
            }
            if !improved {
                return witness;
            }
        }
    }
}

/// Instances with one event or one person fewer, perturbation kept intact.
fn shrink_candidates(witness: &Witness) -> Vec<Witness> {
    let (graph, protected_people, protected_events): (&GraphSpec, Vec<&str>, Vec<&str>) =
        match witness {
            Witness::LabelDependence { graph, pair, .. } => {
                (graph, vec![&pair.0, &pair.1], vec![])
            }
            Witness::FrequencyDecrease { graph, pair, .. } => {
                (graph, vec![&pair.0, &pair.1], vec![])
            }
            Witness::IntimacyDecrease {
                graph,
                pair,
                event_id,
                removed,
                ..
            } => (graph, vec![&pair.0, &pair.1, removed], vec![event_id.as_str()]),
            Witness::VertexDependence {
                graph,
                person,
                change,
                ..
            } => {
                let events = match change {
                    EventChange::Delete(id) => vec![id.as_str()],
                    EventChange::Add(_) => vec![],
                };
                (graph, vec![person.as_str()], events)
            }
            Witness::Superadditive { graph, pair, .. } => {
                (graph, vec![&pair.0, &pair.1], vec![])
            }
            // Sizes and paired observations have no graph to shrink.
            Witness::BaselineMismatch { .. }
            | Witness::EventTotalsOutOfOrder { .. }
            | Witness::EventDependence { .. } => return vec![],
        };
    let mut candidates = Vec::new();
    for (idx, event) in graph.events.iter().enumerate() {
        if protected_events.contains(&event.event_id.as_str()) {
            continue;
        }
        candidates.push(replace_graph(witness, graph.without_event(idx)));
    }
    for label in &graph.people {
        if protected_people.contains(&label.as_str()) {
            continue;
        }
        let smaller = graph.without_person(label);
        // Perturbation events must not reference removed people either.
        match replace_graph(witness, smaller) {
            Witness::FrequencyDecrease {
                graph,
                pair,
                mut added_event,
                before,
                after,
            } => {
                added_event.participants.retain(|p| p != label);
                candidates.push(Witness::FrequencyDecrease {
                    graph,
                    pair,
                    added_event,
                    before,
                    after,
                });
            }
            Witness::Superadditive {
                graph,
                pair,
                mut event,
                base,
                standalone,
                combined,
            } => {
                event.participants.retain(|p| p != label);
                candidates.push(Witness::Superadditive {
                    graph,
                    pair,
                    event,
                    base,
                    standalone,
                    combined,
                });
            }
            Witness::VertexDependence {
                graph,
                person,
                mut change,
                other,
                before,
                after,
            } => {
                if let EventChange::Add(event) = &mut change {
                    event.participants.retain(|p| p != label);
                }
                candidates.push(Witness::VertexDependence {
                    graph,
                    person,
                    change,
                    other,
                    before,
                    after,
                });
            }
            other => candidates.push(other),
        }
    }
    candidates
}

fn replace_graph(witness: &Witness, new_graph: GraphSpec) -> Witness {
    let mut out = witness.clone();
    match &mut out {
        Witness::LabelDependence { graph, .. }
        | Witness::FrequencyDecrease { graph, .. }
        | Witness::IntimacyDecrease { graph, .. }
        | Witness::VertexDependence { graph, .. }
        | Witness::Superadditive { graph, .. } => *graph = new_graph,
        _ => {}
    }
    out
}

/// Pick a pair of distinct people, preferring pairs with a common event
/// when the graph has any.
fn pick_pair(graph: &GraphSpec, rng: &mut ChaCha8Rng) -> Result<(String, String), GraphError> {
    if graph.people.len() < 2 {
        return Err(GraphError::UnknownPersonLabel(
            "<graph has fewer than 2 people>".into(),
        ));
    }
    let g = graph.to_graph()?;
    let ties = g.all_ties();
    if !ties.is_empty() && rng.gen_bool(0.5) {
        let (u, v) = ties[rng.gen_range(0..ties.len())];
        return Ok((g.person_label(u).to_owned(), g.person_label(v).to_owned()));
    }
    let i = rng.gen_range(0..graph.people.len());
    let mut j = rng.gen_range(0..graph.people.len() - 1);
    if j >= i {
        j += 1;
    }
    Ok((graph.people[i].clone(), graph.people[j].clone()))
}

/// A fresh event attended by the pair plus a random subset of other people.
fn new_common_event(
    graph: &GraphSpec,
    pair: &(String, String),
    rng: &mut ChaCha8Rng,
    max_event_size: usize,
) -> EventRecord {
    let others: Vec<String> = graph
        .people
        .iter()
        .filter(|p| **p != pair.0 && **p != pair.1)
        .cloned()
        .collect();
    let extra = rng.gen_range(0..=others.len().min(max_event_size.saturating_sub(2)));
    let mut participants = vec![pair.0.clone(), pair.1.clone()];
    participants.extend(choose_distinct(rng, &others, extra));
    EventRecord {
        event_id: fresh_event_id(graph),
        time: Some(graph.max_time() + 1),
        participants,
    }
}

fn fresh_event_id(graph: &GraphSpec) -> String {
    (0..)
        .map(|i| format!("q{i}"))
        .find(|id| graph.events.iter().all(|e| &e.event_id != id))
        .expect("unbounded id space")
}

/// Choose a common event of size >= 3 and a removable third attendee,
/// inserting one into the graph if the sample has none.
fn pick_removable_attendee(
    graph: &mut GraphSpec,
    pair: &(String, String),
    rng: &mut ChaCha8Rng,
    max_event_size: usize,
) -> Result<(String, String), GraphError> {
    let eligible = |e: &EventRecord| {
        e.participants.contains(&pair.0)
            && e.participants.contains(&pair.1)
            && e.participants.len() >= 3
    };
    if !graph.events.iter().any(&eligible) {
        let others: Vec<String> = graph
            .people
            .iter()
            .filter(|p| **p != pair.0 && **p != pair.1)
            .cloned()
            .collect();
        let extra = if others.is_empty() {
            // Need a third attendee: introduce one.
            graph.people.push("w0".to_owned());
            vec!["w0".to_owned()]
        } else {
            let count = rng.gen_range(1..=others.len().min(max_event_size.saturating_sub(2)).max(1));
            choose_distinct(rng, &others, count)
        };
        let mut participants = vec![pair.0.clone(), pair.1.clone()];
        participants.extend(extra);
        graph.events.push(EventRecord {
            event_id: fresh_event_id(graph),
            time: Some(graph.max_time() + 1),
            participants,
        });
    }
    let options: Vec<usize> = graph
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| eligible(e))
        .map(|(i, _)| i)
        .collect();
    let event = &graph.events[options[rng.gen_range(0..options.len())]];
    let removable: Vec<&String> = event
        .participants
        .iter()
        .filter(|p| **p != pair.0 && **p != pair.1)
        .collect();
    let removed = removable[rng.gen_range(0..removable.len())].clone();
    Ok((event.event_id.clone(), removed))
}

/// Add or delete an event that avoids `person`.
fn pick_event_change(
    graph: &GraphSpec,
    person: &str,
    rng: &mut ChaCha8Rng,
    max_event_size: usize,
) -> EventChange {
    let deletable: Vec<&EventRecord> = graph
        .events
        .iter()
        .filter(|e| e.participants.iter().all(|p| p != person))
        .collect();
    if !deletable.is_empty() && rng.gen_bool(0.5) {
        return EventChange::Delete(
            deletable[rng.gen_range(0..deletable.len())].event_id.clone(),
        );
    }
    let others: Vec<String> = graph
        .people
        .iter()
        .filter(|p| p.as_str() != person)
        .cloned()
        .collect();
    let size = rng.gen_range(0..=others.len().min(max_event_size));
    EventChange::Add(EventRecord {
        event_id: fresh_event_id(graph),
        time: Some(graph.max_time() + 1),
        participants: choose_distinct(rng, &others, size),
    })
}

/// Relabel people and events by seeded random permutations, shuffling list
/// orders as well; timestamps are preserved.
pub fn relabel(graph: &GraphSpec, seed: u64) -> (GraphSpec, BTreeMap<String, String>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut person_codes: Vec<usize> = (0..graph.people.len()).collect();
    person_codes.shuffle(&mut rng);
    let mapping: BTreeMap<String, String> = graph
        .people
        .iter()
        .zip(&person_codes)
        .map(|(old, code)| (old.clone(), format!("r{code}")))
        .collect();
    let mut event_codes: Vec<usize> = (0..graph.events.len()).collect();
    event_codes.shuffle(&mut rng);
    let mut events: Vec<EventRecord> = graph
        .events
        .iter()
        .zip(&event_codes)
        .map(|(event, code)| {
            let mut participants: Vec<String> = event
                .participants
                .iter()
                .map(|p| mapping[p].clone())
                .collect();
            participants.shuffle(&mut rng);
            EventRecord {
                event_id: format!("s{code}"),
                time: event.time,
                participants,
            }
        })
        .collect();
    events.shuffle(&mut rng);
    let mut people: Vec<String> = graph.people.iter().map(|p| mapping[p].clone()).collect();
    people.shuffle(&mut rng);
    (GraphSpec { people, events }, mapping)
}

/// Non-negativity plus zero-score-for-disconnected-pairs, checked over
/// sampled graphs. Returns the first offending instance.
pub fn zero_without_common_events(
    measure: &MeasureSpec,
    sampler: &GraphSampler,
    trials: u32,
) -> Option<(GraphSpec, (String, String), f64)> {
    let eps = measure.comparison_epsilon();
    for trial in 0..trials {
        let mut rng = sampler.rng(100, trial as u64);
        let spec = sampler.sample(&mut rng);
        let g = spec.to_graph().expect("sampled graph is valid");
        let people: Vec<_> = g.people().collect();
        for (i, &u) in people.iter().enumerate() {
            for &v in &people[i + 1..] {
                let Ok(score) = canonical_pair_score::<f64>(&g, measure, u, v) else {
                    continue;
                };
                let disconnected = g.common_events(u, v).expect("valid pair").is_empty();
                if score < -eps || (disconnected && score.abs() > eps) {
                    let pair = (
                        g.person_label(u).to_owned(),
                        g.person_label(v).to_owned(),
                    );
                    return Some((spec, pair, score));
                }
            }
        }
    }
    None
}

/// Single-event totals `f(k) = C(k,2) * h(k)` of a characterized measure:
/// monotone non-decreasing in `k`, and within `[1, C(k,2)]` after
/// normalizing `h` by its baseline value `h(2)`.
pub fn single_event_totals_conform(kind: MeasureKind, max_size: u32) -> Result<(), String> {
    let form = characterized_form(kind).ok_or_else(|| format!("{kind} is not characterized"))?;
    let eps = 1e-12;
    let baseline: f64 = form.h(2);
    let mut previous = f64::NEG_INFINITY;
    for k in 2..=max_size {
        let total: f64 = form.single_event_total(k);
        if total < previous - eps {
            return Err(format!("f({k}) = {total} dropped below f({}) = {previous}", k - 1));
        }
        previous = total;
        let normalized = total / baseline;
        let cap = choose2(k as u64) as f64;
        if !(1.0 - eps..=cap + eps).contains(&normalized) {
            return Err(format!(
                "normalized f({k}) = {normalized} outside [1, C({k},2) = {cap}]"
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
