//! Tie-strength inference from person-by-event co-attendance logs.
//!
//! Given a log of events, each one a set of people that attended it, this
//! crate builds the bipartite person-by-event graph, scores every pair of
//! people with any of twelve tie-strength measures, machine-checks the
//! eight conformance axioms against a measure, ranks ties under the
//! dominance partial order on tie profiles (and extends it to a total
//! order), and correlates measures with Kendall's tau.
//!
//! The numeric core is generic over the scalar type: any [`scalar::Real`]
//! (`f32`, `f64`) works for scores, and the order extension additionally
//! accepts exact types such as rationals. The crate-root aliases fix the
//! default `f64` instantiation used by the CLI.
//!
//! ```
//! use ties::graph::build_graph;
//! use ties::ingest::EventRecord;
//! use ties::measures::{score_all, MeasureKind, MeasureSpec};
//! use ties::order::incomparability_census;
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let events = vec![
//!     EventRecord {
//!         event_id: "dinner".into(),
//!         time: None,
//!         participants: vec!["ada".into(), "bob".into(), "cyd".into()],
//!     },
//!     EventRecord {
//!         event_id: "walk".into(),
//!         time: None,
//!         participants: vec!["ada".into(), "bob".into()],
//!     },
//! ];
//! let graph = build_graph(&events)?;
//! let scores: ties::ScoreTable = score_all(&graph, &MeasureSpec::new(MeasureKind::Linear)?)?;
//! assert_eq!(scores.get("ada", "bob"), 1.0 / 3.0 + 0.5);
//! let census = incomparability_census(&graph)?;
//! assert_eq!((census.total, census.count), (3, 0));
//! # Ok(()) }
//! ```

pub mod axioms;
pub mod graph;
pub mod ingest;
pub mod measures;
pub mod order;
pub mod scalar;
pub mod stats;

pub use graph::{BipartiteGraph, EventRef, GraphError, PersonRef, TieProfile};
pub use ingest::EventRecord;
pub use measures::{MeasureError, MeasureKind, MeasureSpec, TieScoreTable};
pub use order::{CensusResult, ConflictCensus, OrderRelation};

/// Default score scalar.
pub type Score = f64;
/// Score table over the default scalar.
pub type ScoreTable = measures::TieScoreTable<Score>;
/// Linear-extension table over the default scalar.
pub type ExtensionTable = order::ExtensionTable<Score>;
/// Kendall's tau matrix over the default scalar.
pub type TauMatrix = stats::TauMatrix<Score>;
