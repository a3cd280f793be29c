//! Deterministic random graph generation for axiom trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{BipartiteGraph, GraphError};
use crate::ingest::EventRecord;

/// A graph as a replayable description: the full person roster (attendees
/// and isolated people) plus the event log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub people: Vec<String>,
    pub events: Vec<EventRecord>,
}

impl GraphSpec {
    pub fn to_graph(&self) -> Result<BipartiteGraph, GraphError> {
        crate::graph::build_graph_with_roster(&self.people, &self.events)
    }

    pub fn from_graph(g: &BipartiteGraph) -> Self {
        Self {
            people: g.people().map(|p| g.person_label(p).to_owned()).collect(),
            events: g.to_event_records(),
        }
    }

    /// Largest timestamp present, for appending strictly later events.
    pub fn max_time(&self) -> i64 {
        self.events.iter().filter_map(|e| e.time).max().unwrap_or(0)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seeded, bounded random-graph source. The same seed and bounds always
/// produce the same trial sequence; trial `i` of stream `s` draws from an
/// independent generator derived from `(seed, s, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSampler {
    pub seed: u64,
    pub max_people: usize,
    pub max_events: usize,
    pub max_event_size: usize,
}

impl GraphSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_people: 8,
            max_events: 6,
            max_event_size: 5,
        }
    }

    pub fn rng(&self, stream: u64, index: u64) -> ChaCha8Rng {
        let mixed = splitmix64(self.seed ^ splitmix64(stream ^ splitmix64(index)));
        ChaCha8Rng::seed_from_u64(mixed)
    }

    /// Draw a random graph description. Every event carries a timestamp
    /// (`index / 2`, so equal timestamps occur); sizes 0 and 1 appear with
    /// small probability.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> GraphSpec {
        let n_people = rng.gen_range(2..=self.max_people.max(2));
        let people: Vec<String> = (0..n_people).map(|i| format!("p{i}")).collect();
        let n_events = rng.gen_range(0..=self.max_events);
        let events = (0..n_events)
            .map(|i| {
                let size = if rng.gen_bool(0.15) {
                    rng.gen_range(0..=1.min(n_people))
                } else {
                    rng.gen_range(2..=self.max_event_size.min(n_people).max(2))
                };
                EventRecord {
                    event_id: format!("e{i}"),
                    time: Some((i / 2) as i64),
                    participants: choose_distinct(rng, &people, size),
                }
            })
            .collect();
        GraphSpec { people, events }
    }
}

/// Uniformly choose `count` distinct items, preserving no particular order.
pub fn choose_distinct(rng: &mut ChaCha8Rng, pool: &[String], count: usize) -> Vec<String> {
    let count = count.min(pool.len());
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    for i in 0..count {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    indices[..count].iter().map(|&i| pool[i].clone()).collect()
}
