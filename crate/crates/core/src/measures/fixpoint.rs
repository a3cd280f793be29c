//! Iterative measures: random walk with restarts, SimRank, and the two
//! proportional-attention fixed points.
//!
//! All four use synchronous updates, so results do not depend on iteration
//! order inside one sweep. Iteration stops when the sweep-to-sweep change
//! drops below the configured tolerance; hitting the iteration cap is an error
//! that reports the residual, never a silent result.

use std::collections::BTreeMap;

use crate::graph::{BipartiteGraph, EventRef, PersonRef};
use crate::scalar::Real;

use super::{MeasureError, MeasureKind, MeasureSpec};

/// Stationary distribution over all nodes (people then events) of the walk
/// that restarts at `source` with probability `alpha` and otherwise moves to
/// a uniformly random neighbor. Only the person entries are returned.
pub fn rwr_distribution<S: Real>(
    g: &BipartiteGraph,
    source: PersonRef,
    spec: &MeasureSpec,
) -> Result<Vec<S>, MeasureError> {
    spec.clone().validated()?;
    if g.events_of(source)?.is_empty() {
        return Err(MeasureError::IsolatedSource(
            g.person_label(source).to_owned(),
        ));
    }
    let people = g.person_count();
    let events = g.event_count();
    let n = people + events;
    let alpha = S::from_f64_exact(spec.rwr_alpha);
    let keep = S::one() - alpha;
    let tolerance = S::from_f64_exact(spec.tolerance);
    let source_idx = source.0 as usize;

    let mut current = vec![S::zero(); n];
    current[source_idx] = S::one();
    let mut next = vec![S::zero(); n];
    let mut residual = S::infinity();

    for _ in 0..spec.max_iterations {
        for x in next.iter_mut() {
            *x = S::zero();
        }
        next[source_idx] = alpha;
        for (p, &mass) in current.iter().take(people).enumerate() {
            if mass > S::zero() {
                let neighbors = g.events_of(PersonRef(p as u32)).expect("indexed person");
                if neighbors.is_empty() {
                    // An isolated node never holds mass except a degenerate
                    // source; route to the restart target.
                    next[source_idx] = next[source_idx] + mass * keep;
                } else {
                    let share = mass * keep / S::from_usize_exact(neighbors.len());
                    for &e in neighbors {
                        let idx = people + e.0 as usize;
                        next[idx] = next[idx] + share;
                    }
                }
            }
        }
        for (e, &mass) in current[people..].iter().enumerate() {
            if mass > S::zero() {
                let neighbors = g.attendees(EventRef(e as u32));
                let share = mass * keep / S::from_usize_exact(neighbors.len());
                for &p in neighbors {
                    next[p.0 as usize] = next[p.0 as usize] + share;
                }
            }
        }
        residual = current
            .iter()
            .zip(next.iter())
            .map(|(&a, &b)| (a - b).abs())
            .fold(S::zero(), |acc, d| acc + d);
        std::mem::swap(&mut current, &mut next);
        if residual < tolerance {
            current.truncate(people);
            return Ok(current);
        }
    }
    Err(MeasureError::NonConvergence {
        measure: MeasureKind::RandomWalkRestart,
        iterations: spec.max_iterations,
        residual: residual.as_f64(),
        tolerance: spec.tolerance,
        context: format!("walk source {:?}", g.person_label(source)),
    })
}

/// SimRank similarity matrices for both sides of the bipartite graph.
pub struct SimrankScores<S> {
    /// `people[u][v]`, symmetric, unit diagonal.
    pub people: Vec<Vec<S>>,
    /// `events[p][q]`, symmetric, unit diagonal.
    pub events: Vec<Vec<S>>,
}

/// Fixed point of the bipartite SimRank recursion: a person pair's
/// similarity is `gamma` times the mean similarity of their event pairs, and
/// symmetrically for events. Self-similarity is 1 by definition; pairs with
/// an empty neighbor set score 0. Off-diagonal entries start at 0.
pub fn simrank_scores<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<SimrankScores<S>, MeasureError> {
    spec.clone().validated()?;
    let people = g.person_count();
    let events = g.event_count();
    let gamma = S::from_f64_exact(spec.simrank_gamma);
    let tolerance = S::from_f64_exact(spec.tolerance);

    let identity = |n: usize| -> Vec<Vec<S>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect()
    };
    let mut person_sim = identity(people);
    let mut event_sim = identity(events);
    let mut residual = S::infinity();

    for _ in 0..spec.max_iterations {
        let mut delta = S::zero();
        let mut next_person = identity(people);
        for u in 0..people {
            let ev_u = g.events_of(PersonRef(u as u32)).expect("indexed person");
            for v in u + 1..people {
                let ev_v = g.events_of(PersonRef(v as u32)).expect("indexed person");
                let value = if ev_u.is_empty() || ev_v.is_empty() {
                    S::zero()
                } else {
                    let mut sum = S::zero();
                    for &a in ev_u {
                        let row = &event_sim[a.0 as usize];
                        for &b in ev_v {
                            sum = sum + row[b.0 as usize];
                        }
                    }
                    gamma * sum / S::from_usize_exact(ev_u.len() * ev_v.len())
                };
                delta = delta.max((value - person_sim[u][v]).abs());
                next_person[u][v] = value;
                next_person[v][u] = value;
            }
        }
        let mut next_event = identity(events);
        for p in 0..events {
            let at_p = g.attendees(EventRef(p as u32));
            for q in p + 1..events {
                let at_q = g.attendees(EventRef(q as u32));
                let value = if at_p.is_empty() || at_q.is_empty() {
                    S::zero()
                } else {
                    let mut sum = S::zero();
                    for &a in at_p {
                        let row = &person_sim[a.0 as usize];
                        for &b in at_q {
                            sum = sum + row[b.0 as usize];
                        }
                    }
                    gamma * sum / S::from_usize_exact(at_p.len() * at_q.len())
                };
                delta = delta.max((value - event_sim[p][q]).abs());
                next_event[p][q] = value;
                next_event[q][p] = value;
            }
        }
        person_sim = next_person;
        event_sim = next_event;
        residual = delta;
        if residual < tolerance {
            return Ok(SimrankScores {
                people: person_sim,
                events: event_sim,
            });
        }
    }
    Err(MeasureError::NonConvergence {
        measure: MeasureKind::SimRank,
        iterations: spec.max_iterations,
        residual: residual.as_f64(),
        tolerance: spec.tolerance,
        context: "similarity fixed point".to_owned(),
    })
}

/// Directed fixed point of the proportional-attention equations.
///
/// For each directed tie `(u,v)` with `k` common events:
/// `TS(u,v) = eps * sum_P 1/|P| + k * (1-eps) * TS(u,v) / D(u)` where `D(u)`
/// sums `TS(u,w)` over all of `u`'s tie partners. Iteration is Jacobi-style
/// from the initialization `TS0(u,v) = sum_P 1/|P|`.
pub fn proportional_table<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<BTreeMap<(PersonRef, PersonRef), S>, MeasureError> {
    spec.clone().validated()?;
    let epsilon = S::from_f64_exact(spec.epsilon);
    let keep = S::one() - epsilon;
    let tolerance = S::from_f64_exact(spec.tolerance);

    // Directed tie list grouped by left endpoint.
    struct Arc<S> {
        target: PersonRef,
        common: S,
        linear: S,
        value: S,
    }
    let mut rows: BTreeMap<PersonRef, Vec<Arc<S>>> = BTreeMap::new();
    for (u, v) in g.all_ties() {
        let events = g.common_events(u, v).expect("tie endpoints");
        let linear = events
            .iter()
            .map(|&e| S::one() / S::from_usize_exact(g.event_size(e)))
            .fold(S::zero(), |acc, w| acc + w);
        let common = S::from_usize_exact(events.len());
        for (a, b) in [(u, v), (v, u)] {
            rows.entry(a).or_default().push(Arc {
                target: b,
                common,
                linear,
                value: linear,
            });
        }
    }

    let mut residual = S::infinity();
    for _ in 0..spec.max_iterations {
        let mut delta = S::zero();
        let mut updates: Vec<(PersonRef, Vec<S>)> = Vec::with_capacity(rows.len());
        for (&u, arcs) in &rows {
            let denominator = arcs.iter().fold(S::zero(), |acc, a| acc + a.value);
            let next: Vec<S> = arcs
                .iter()
                .map(|arc| {
                    let share = if denominator > S::zero() {
                        arc.value / denominator
                    } else {
                        S::zero()
                    };
                    epsilon * arc.linear + arc.common * keep * share
                })
                .collect();
            for (arc, &n) in arcs.iter().zip(&next) {
                delta = delta.max((n - arc.value).abs());
            }
            updates.push((u, next));
        }
        for (u, next) in updates {
            for (arc, n) in rows.get_mut(&u).expect("row").iter_mut().zip(next) {
                arc.value = n;
            }
        }
        residual = delta;
        if residual < tolerance {
            let mut out = BTreeMap::new();
            for (u, arcs) in rows {
                for arc in arcs {
                    out.insert((u, arc.target), arc.value);
                }
            }
            return Ok(out);
        }
    }
    Err(MeasureError::NonConvergence {
        measure: MeasureKind::Proportional,
        iterations: spec.max_iterations,
        residual: residual.as_f64(),
        tolerance: spec.tolerance,
        context: "proportional fixed point".to_owned(),
    })
}

/// Run one synchronous proportional sweep over a directed value map and
/// return the largest absolute change. Used to check the fixed-point
/// property of a converged table.
pub fn proportional_residual<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
    directed: &BTreeMap<(PersonRef, PersonRef), S>,
) -> S {
    let epsilon = S::from_f64_exact(spec.epsilon);
    let keep = S::one() - epsilon;
    let mut delta = S::zero();
    for (&(u, v), &value) in directed {
        let events = g.common_events(u, v).expect("tie endpoints");
        let linear = events
            .iter()
            .map(|&e| S::one() / S::from_usize_exact(g.event_size(e)))
            .fold(S::zero(), |acc, w| acc + w);
        let denominator = directed
            .range((u, PersonRef(0))..=(u, PersonRef(u32::MAX)))
            .fold(S::zero(), |acc, (_, &x)| acc + x);
        let share = if denominator > S::zero() {
            value / denominator
        } else {
            S::zero()
        };
        let next = epsilon * linear + S::from_usize_exact(events.len()) * keep * share;
        delta = delta.max((next - value).abs());
    }
    delta
}

/// Directed temporal-proportional values after replaying all events in
/// ascending (timestamp, event label) order. Only pairs that co-attended at
/// least one event appear in the result.
pub fn temporal_table<S: Real>(
    g: &BipartiteGraph,
    spec: &MeasureSpec,
) -> Result<BTreeMap<(PersonRef, PersonRef), S>, MeasureError> {
    spec.clone().validated()?;
    let epsilon = S::from_f64_exact(spec.epsilon);
    let keep = S::one() - epsilon;
    let init = S::from_f64_exact(spec.temporal_init);

    let mut schedule: Vec<(i64, &str, EventRef)> = Vec::with_capacity(g.event_count());
    for e in g.events() {
        let time = g
            .event_time(e)
            .ok_or_else(|| MeasureError::MissingTimestamp(g.event_label(e).to_owned()))?;
        schedule.push((time, g.event_label(e), e));
    }
    schedule.sort();

    let mut values: BTreeMap<(PersonRef, PersonRef), S> = BTreeMap::new();
    for (_, _, event) in schedule {
        let attendees = g.attendees(event);
        let k = attendees.len();
        if k < 2 {
            continue;
        }
        let size = S::from_usize_exact(k);
        let mut updates: Vec<((PersonRef, PersonRef), S)> = Vec::with_capacity(k * (k - 1));
        for &u in attendees {
            let denominator = attendees
                .iter()
                .filter(|&&w| w != u)
                .map(|&w| values.get(&(u, w)).copied().unwrap_or(init))
                .fold(S::zero(), |acc, x| acc + x);
            for &v in attendees {
                if v == u {
                    continue;
                }
                let previous = values.get(&(u, v)).copied().unwrap_or(init);
                let share = if denominator > S::zero() {
                    previous / denominator
                } else {
                    // Unreachable with a positive init; uniform fallback.
                    S::one() / S::from_usize_exact(k - 1)
                };
                updates.push(((u, v), epsilon / size + keep * share));
            }
        }
        values.extend(updates);
    }
    Ok(values)
}
