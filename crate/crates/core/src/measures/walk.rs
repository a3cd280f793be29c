//! Truncated walk accumulation for the Katz measure.

use crate::graph::{BipartiteGraph, PersonRef};
use crate::scalar::Real;

use super::{MeasureError, MeasureSpec};

/// Discounted walk mass from `source` to every person: for each even walk
/// length `l = 2, 4, ..., L`, every walk of `l` edges in the bipartite graph
/// contributes `gamma^-l`. Odd lengths end on the event side and cannot
/// reach a person.
///
/// Each step multiplies the walk-count vector by the adjacency and by
/// `1/gamma`, so the entry for a person after `l` steps is already the
/// discounted count.
pub fn katz_vector<S: Real>(
    g: &BipartiteGraph,
    source: PersonRef,
    spec: &MeasureSpec,
) -> Result<Vec<S>, MeasureError> {
    spec.clone().validated()?;
    g.events_of(source)?;
    let people = g.person_count();
    let events = g.event_count();
    let inv_gamma = S::from_f64_exact(1.0 / spec.katz_gamma);

    // Unified node space: people first, then events.
    let mut current = vec![S::zero(); people + events];
    current[source.0 as usize] = S::one();
    let mut next = vec![S::zero(); people + events];
    let mut accumulated = vec![S::zero(); people];

    for step in 1..=spec.katz_max_walk_length {
        for x in next.iter_mut() {
            *x = S::zero();
        }
        for (p, &mass) in current.iter().take(people).enumerate() {
            if mass > S::zero() {
                for &e in g.events_of(PersonRef(p as u32)).expect("indexed person") {
                    next[people + e.0 as usize] = next[people + e.0 as usize] + mass * inv_gamma;
                }
            }
        }
        for (e, &mass) in current[people..].iter().enumerate() {
            if mass > S::zero() {
                for &p in g.attendees(crate::graph::EventRef(e as u32)) {
                    next[p.0 as usize] = next[p.0 as usize] + mass * inv_gamma;
                }
            }
        }
        std::mem::swap(&mut current, &mut next);
        if step % 2 == 0 {
            for p in 0..people {
                accumulated[p] = accumulated[p] + current[p];
            }
        }
    }
    Ok(accumulated)
}
