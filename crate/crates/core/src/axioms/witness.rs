//! Replayable counterexamples produced by the axiom checker.
//!
//! Every violation carries the full graph description and perturbation that
//! produced it, plus the observed values, so re-running the check on the
//! stored instance reproduces the verdict bit for bit.

use serde::{Deserialize, Serialize};

use crate::ingest::EventRecord;

use super::sampler::GraphSpec;
use super::A2Mode;

/// The perturbation applied in a vertex-independence trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventChange {
    Add(EventRecord),
    Delete(String),
}

/// One record of the observational event-independence check: what an added
/// event did to an existing tie strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A7Observation {
    pub graph: GraphSpec,
    pub pair: (String, String),
    pub added_event: EventRecord,
    /// Tie strength before the event.
    pub existing: f64,
    /// Tie strength after the event.
    pub updated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DependenceKind {
    /// Same (existing strength, event size) produced different outputs.
    Inconsistent,
    /// A larger existing strength produced a smaller output.
    NonMonotone,
}

/// A violating instance, specific to the axiom that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// Relabeling changed a score.
    LabelDependence {
        graph: GraphSpec,
        pair: (String, String),
        relabel_seed: u64,
        mapped_pair: (String, String),
        original: f64,
        relabeled: f64,
    },
    /// The empty-graph / two-person-event anchor values are off.
    BaselineMismatch {
        mode: A2Mode,
        empty_value: Option<f64>,
        single_event_value: Option<f64>,
    },
    /// Adding a common event decreased the score.
    FrequencyDecrease {
        graph: GraphSpec,
        pair: (String, String),
        added_event: EventRecord,
        before: f64,
        after: f64,
    },
    /// Removing a third attendee from a common event decreased the score.
    IntimacyDecrease {
        graph: GraphSpec,
        pair: (String, String),
        event_id: String,
        removed: String,
        before: f64,
        after: f64,
    },
    /// A larger single event generated less total tie strength.
    EventTotalsOutOfOrder {
        larger: u32,
        smaller: u32,
        larger_total: f64,
        smaller_total: f64,
    },
    /// An event avoiding `person` changed one of their scores.
    VertexDependence {
        graph: GraphSpec,
        person: String,
        change: EventChange,
        other: String,
        before: f64,
        after: f64,
    },
    /// Two observations incompatible with any fixed monotone update rule.
    EventDependence {
        kind: DependenceKind,
        first: A7Observation,
        second: A7Observation,
    },
    /// An event added more than its standalone tie strength.
    Superadditive {
        graph: GraphSpec,
        pair: (String, String),
        event: EventRecord,
        base: f64,
        standalone: f64,
        combined: f64,
    },
}

impl Witness {
    /// Short human-readable description of what went wrong.
    pub fn summary(&self) -> String {
        match self {
            Witness::LabelDependence {
                original, relabeled, ..
            } => format!("relabeling changed the score: {original} -> {relabeled}"),
            Witness::BaselineMismatch {
                mode,
                empty_value,
                single_event_value,
            } => format!(
                "baseline anchors off in {mode:?} mode: empty={empty_value:?}, two-person event={single_event_value:?}"
            ),
            Witness::FrequencyDecrease { before, after, .. } => {
                format!("new common event decreased the score: {before} -> {after}")
            }
            Witness::IntimacyDecrease {
                removed,
                before,
                after,
                ..
            } => format!("removing attendee {removed:?} decreased the score: {before} -> {after}"),
            Witness::EventTotalsOutOfOrder {
                larger,
                smaller,
                larger_total,
                smaller_total,
            } => format!(
                "size-{larger} event generated {larger_total} total, below size-{smaller}'s {smaller_total}"
            ),
            Witness::VertexDependence {
                person,
                other,
                before,
                after,
                ..
            } => format!(
                "score of {person:?}-{other:?} changed without touching {person:?}: {before} -> {after}"
            ),
            Witness::EventDependence { kind, first, second } => format!(
                "{kind:?}: existing {} with size-{} event gave {}, existing {} gave {}",
                first.existing,
                first.added_event.participants.len(),
                first.updated,
                second.existing,
                second.updated
            ),
            Witness::Superadditive {
                base,
                standalone,
                combined,
                ..
            } => format!(
                "combined score {combined} exceeds base {base} + standalone {standalone}"
            ),
        }
    }
}

impl GraphSpec {
    /// Copy with event `idx` dropped.
    pub(super) fn without_event(&self, idx: usize) -> GraphSpec {
        let mut out = self.clone();
        out.events.remove(idx);
        out
    }

    /// Copy with `label` removed from the roster and every participant list.
    pub(super) fn without_person(&self, label: &str) -> GraphSpec {
        let mut out = self.clone();
        out.people.retain(|p| p != label);
        for event in &mut out.events {
            event.participants.retain(|p| p != label);
        }
        out
    }
}
