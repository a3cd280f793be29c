//! Immutable bipartite person-by-event graph and per-pair tie profiles.
//!
//! People and events live in dense index spaces with a symbol table mapping
//! indices back to the original string labels. The graph is frozen at
//! construction; every query is a pure read, so queries may run concurrently
//! without coordination.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::EventRecord;

/// Dense index of a person in the graph's symbol table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PersonRef(pub u32);

/// Dense index of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventRef(pub u32);

/// Ascending multiset of attendee counts of the events common to a pair.
///
/// The element of the dominance partial order associated with a tie. Every
/// entry is at least 2: an event common to two distinct people contains both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TieProfile(Vec<u32>);

impl TieProfile {
    /// Build from raw sizes; sorts ascending. Entries below 2 are rejected.
    pub fn new(mut sizes: Vec<u32>) -> Result<Self, GraphError> {
        if let Some(&bad) = sizes.iter().find(|&&s| s < 2) {
            return Err(GraphError::InvalidProfileEntry(bad));
        }
        sizes.sort_unstable();
        Ok(Self(sizes))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn sizes(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Orders by (length, lexicographic), which doubles as the deterministic
/// tie-break key used by the linear-extension machinery.
impl Ord for TieProfile {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for TieProfile {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for TieProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate event identifier: {0:?}")]
    DuplicateEventId(String),
    #[error("empty event identifier")]
    EmptyEventId,
    #[error("empty participant label in event {0:?}")]
    EmptyParticipantLabel(String),
    #[error("unknown person index {0}")]
    UnknownPerson(u32),
    #[error("unknown person label {0:?}")]
    UnknownPersonLabel(String),
    #[error("persons must be distinct, got {0:?} twice")]
    SamePerson(String),
    #[error("tie profile entry {0} below 2")]
    InvalidProfileEntry(u32),
}

/// Immutable bipartite person-by-event incidence structure.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    people: Vec<String>,
    person_index: HashMap<String, PersonRef>,
    event_labels: Vec<String>,
    event_times: Vec<Option<i64>>,
    /// person -> attended events, ascending.
    person_events: Vec<Vec<EventRef>>,
    /// event -> attendees, ascending.
    event_people: Vec<Vec<PersonRef>>,
    dedup_collapsed: usize,
}

/// Build the graph from an event log.
///
/// Duplicate participants within one event are collapsed and counted in
/// [`BipartiteGraph::dedup_collapsed`]. Duplicate event identifiers are
/// rejected. People are indexed in order of first appearance.
pub fn build_graph(events: &[EventRecord]) -> Result<BipartiteGraph, GraphError> {
    build_graph_with_roster(&[], events)
}

/// Like [`build_graph`], but pre-registers `roster` labels so people that
/// attend no event still exist in the symbol table (they produce no ties).
pub fn build_graph_with_roster(
    roster: &[String],
    events: &[EventRecord],
) -> Result<BipartiteGraph, GraphError> {
    let mut g = BipartiteGraph {
        people: Vec::new(),
        person_index: HashMap::new(),
        event_labels: Vec::new(),
        event_times: Vec::new(),
        person_events: Vec::new(),
        event_people: Vec::new(),
        dedup_collapsed: 0,
    };
    for label in roster {
        if label.is_empty() {
            return Err(GraphError::EmptyParticipantLabel("<roster>".into()));
        }
        g.intern_person(label);
    }
    let mut seen_events: HashMap<&str, ()> = HashMap::new();
    for record in events {
        if record.event_id.is_empty() {
            return Err(GraphError::EmptyEventId);
        }
        if seen_events.insert(&record.event_id, ()).is_some() {
            return Err(GraphError::DuplicateEventId(record.event_id.clone()));
        }
        let event = EventRef(g.event_labels.len() as u32);
        g.event_labels.push(record.event_id.clone());
        g.event_times.push(record.time);
        let mut attendees: Vec<PersonRef> = Vec::with_capacity(record.participants.len());
        for label in &record.participants {
            if label.is_empty() {
                return Err(GraphError::EmptyParticipantLabel(record.event_id.clone()));
            }
            let p = g.intern_person(label);
            if attendees.contains(&p) {
                g.dedup_collapsed += 1;
            } else {
                attendees.push(p);
            }
        }
        attendees.sort_unstable();
        for &p in &attendees {
            g.person_events[p.0 as usize].push(event);
        }
        g.event_people.push(attendees);
    }
    Ok(g)
}

impl BipartiteGraph {
    fn intern_person(&mut self, label: &str) -> PersonRef {
        if let Some(&p) = self.person_index.get(label) {
            return p;
        }
        let p = PersonRef(self.people.len() as u32);
        self.people.push(label.to_owned());
        self.person_index.insert(label.to_owned(), p);
        self.person_events.push(Vec::new());
        p
    }

    pub fn person_count(&self) -> usize {
        self.people.len()
    }

    pub fn event_count(&self) -> usize {
        self.event_labels.len()
    }

    pub fn person_label(&self, p: PersonRef) -> &str {
        &self.people[p.0 as usize]
    }

    pub fn event_label(&self, e: EventRef) -> &str {
        &self.event_labels[e.0 as usize]
    }

    pub fn event_time(&self, e: EventRef) -> Option<i64> {
        self.event_times[e.0 as usize]
    }

    pub fn person(&self, label: &str) -> Option<PersonRef> {
        self.person_index.get(label).copied()
    }

    pub fn people(&self) -> impl Iterator<Item = PersonRef> + '_ {
        (0..self.people.len() as u32).map(PersonRef)
    }

    pub fn events(&self) -> impl Iterator<Item = EventRef> + '_ {
        (0..self.event_labels.len() as u32).map(EventRef)
    }

    /// Events attended by `p`, ascending.
    pub fn events_of(&self, p: PersonRef) -> Result<&[EventRef], GraphError> {
        self.person_events
            .get(p.0 as usize)
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownPerson(p.0))
    }

    /// Attendees of `e`, ascending.
    pub fn attendees(&self, e: EventRef) -> &[PersonRef] {
        &self.event_people[e.0 as usize]
    }

    pub fn event_size(&self, e: EventRef) -> usize {
        self.event_people[e.0 as usize].len()
    }

    /// Number of duplicate participant entries collapsed at construction.
    pub fn dedup_collapsed(&self) -> usize {
        self.dedup_collapsed
    }

    fn check_pair(&self, u: PersonRef, v: PersonRef) -> Result<(), GraphError> {
        if u.0 as usize >= self.people.len() {
            return Err(GraphError::UnknownPerson(u.0));
        }
        if v.0 as usize >= self.people.len() {
            return Err(GraphError::UnknownPerson(v.0));
        }
        if u == v {
            return Err(GraphError::SamePerson(self.person_label(u).to_owned()));
        }
        Ok(())
    }

    /// Events attended by both `u` and `v`.
    pub fn common_events(&self, u: PersonRef, v: PersonRef) -> Result<Vec<EventRef>, GraphError> {
        self.check_pair(u, v)?;
        let (a, b) = (
            &self.person_events[u.0 as usize],
            &self.person_events[v.0 as usize],
        );
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Ascending sizes of the events common to `u` and `v`.
    pub fn tie_profile(&self, u: PersonRef, v: PersonRef) -> Result<TieProfile, GraphError> {
        let sizes = self
            .common_events(u, v)?
            .into_iter()
            .map(|e| self.event_size(e) as u32)
            .collect();
        TieProfile::new(sizes)
    }

    /// Every unordered pair with at least one common event, each pair once,
    /// ascending by index pair.
    pub fn all_ties(&self) -> Vec<(PersonRef, PersonRef)> {
        let mut ties: BTreeSet<(PersonRef, PersonRef)> = BTreeSet::new();
        for attendees in &self.event_people {
            for (i, &a) in attendees.iter().enumerate() {
                for &b in &attendees[i + 1..] {
                    ties.insert((a, b));
                }
            }
        }
        ties.into_iter().collect()
    }

    /// Count of events per attendee count.
    pub fn event_size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for attendees in &self.event_people {
            *hist.entry(attendees.len()).or_insert(0) += 1;
        }
        hist
    }

    /// The graph as an event log (labels, times, attendees), in event order.
    pub fn to_event_records(&self) -> Vec<EventRecord> {
        self.events()
            .map(|e| EventRecord {
                event_id: self.event_label(e).to_owned(),
                time: self.event_time(e),
                participants: self
                    .attendees(e)
                    .iter()
                    .map(|&p| self.person_label(p).to_owned())
                    .collect(),
            })
            .collect()
    }
}
