//! Kendall's tau-b rank correlation between score tables and the full
//! measure-by-measure correlation matrix.
//!
//! The per-pair coefficient uses the tie-corrected tau-b form because
//! integer-valued measures produce heavy rank ties. The fast path sorts once
//! and counts discordant pairs with a merge sort, `O(n log n)`.

use std::collections::BTreeSet;
use std::io::Write;

use thiserror::Error;

use crate::graph::{BipartiteGraph, PersonRef};
use crate::measures::{choose2, score_pairs, MeasureKind, MeasureSpec, TieScoreTable};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("Kendall's tau needs at least 2 aligned ties, got {0}")]
    TooFewKeys(usize),
    #[error("a tau matrix needs at least 2 measures, got {0}")]
    TooFewMeasures(usize),
}

/// Which unordered pairs a tau matrix aligns on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScope {
    /// Pairs with at least one common event (the default).
    Ties,
    /// Every unordered pair of people in the graph.
    AllPairs,
}

/// Tau-b over aligned `(x, y)` score pairs. Returns 0 when either ranking is
/// constant.
pub fn kendall_tau_pairs<S: Real>(values: &mut [(S, S)]) -> Result<S, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::TooFewKeys(n));
    }
    values.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite score")
            .then(a.1.partial_cmp(&b.1).expect("finite score"))
    });
    let total = choose2(n as u64);
    let tied_x = tied_pairs(values.iter().map(|p| p.0));
    let tied_xy = tied_pairs_by(values, |a, b| a == b);
    let mut ys: Vec<S> = values.iter().map(|p| p.1).collect();
    let discordant = sort_counting_inversions(&mut ys);
    let tied_y = tied_pairs(ys.iter().copied());

    let denom_x = total - tied_x;
    let denom_y = total - tied_y;
    if denom_x == 0 || denom_y == 0 {
        return Ok(S::zero());
    }
    let concordant_minus_discordant =
        total as i128 - tied_x as i128 - tied_y as i128 + tied_xy as i128
            - 2 * discordant as i128;
    let tau = concordant_minus_discordant as f64 / (denom_x as f64 * denom_y as f64).sqrt();
    Ok(S::from_f64_exact(tau))
}

/// Tau-b between two score tables, aligned on the union of their keys with
/// absent entries read as 0.
pub fn kendall_tau<S: Real>(
    a: &TieScoreTable<S>,
    b: &TieScoreTable<S>,
) -> Result<S, StatsError> {
    let keys: BTreeSet<&(String, String)> =
        a.iter().map(|(k, _)| k).chain(b.iter().map(|(k, _)| k)).collect();
    let mut values: Vec<(S, S)> = keys
        .into_iter()
        .map(|k| (a.get(&k.0, &k.1), b.get(&k.0, &k.1)))
        .collect();
    kendall_tau_pairs(&mut values)
}

fn tied_pairs<S: Real>(sorted: impl Iterator<Item = S>) -> u64 {
    let mut total = 0_u64;
    let mut run = 0_u64;
    let mut previous: Option<S> = None;
    for value in sorted {
        if previous == Some(value) {
            run += 1;
        } else {
            total += choose2(run);
            run = 1;
        }
        previous = Some(value);
    }
    total + choose2(run)
}

fn tied_pairs_by<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0_u64;
    let mut run = 1_u64;
    for window in sorted.windows(2) {
        if eq(&window[0], &window[1]) {
            run += 1;
        } else {
            total += choose2(run);
            run = 1;
        }
    }
    if sorted.is_empty() {
        0
    } else {
        total + choose2(run)
    }
}

/// Merge sort that counts strict inversions (`i < j` with `v[i] > v[j]`).
fn sort_counting_inversions<S: Real>(values: &mut [S]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mut buffer = values.to_vec();
    merge_count(values, &mut buffer)
}

fn merge_count<S: Real>(values: &mut [S], buffer: &mut [S]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left_buf, right_buf) = buffer.split_at_mut(mid);
    let mut inversions = {
        let (left, right) = values.split_at_mut(mid);
        merge_count(left, left_buf) + merge_count(right, right_buf)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        // Equal values go left-first and are not inversions.
        if values[j] < values[i] {
            inversions += (mid - i) as u64;
            buffer[k] = values[j];
            j += 1;
        } else {
            buffer[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    while i < mid {
        buffer[k] = values[i];
        i += 1;
        k += 1;
    }
    while j < n {
        buffer[k] = values[j];
        j += 1;
        k += 1;
    }
    values.copy_from_slice(&buffer[..n]);
    inversions
}

/// Pairwise tau-b over a list of measures: symmetric with a unit diagonal.
/// A measure that fails to evaluate annotates its row and column as missing
/// instead of aborting the matrix.
#[derive(Debug, Clone)]
pub struct TauMatrix<S> {
    measures: Vec<MeasureKind>,
    cells: Vec<Vec<Option<S>>>,
    failures: Vec<Option<String>>,
}

impl<S: Real> TauMatrix<S> {
    pub fn measures(&self) -> &[MeasureKind] {
        &self.measures
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<S> {
        self.cells[i][j]
    }

    /// The evaluation failure that blanked measure `i`'s row, if any.
    pub fn failure(&self, i: usize) -> Option<&str> {
        self.failures[i].as_deref()
    }

    /// CSV with a header row of measure names; cells `%.6f`, `nan` when
    /// missing.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["measure".to_owned()];
        header.extend(self.measures.iter().map(|m| m.name().to_owned()));
        writer.write_record(&header)?;
        for (i, m) in self.measures.iter().enumerate() {
            let mut row = vec![m.name().to_owned()];
            for j in 0..self.measures.len() {
                row.push(match self.cells[i][j] {
                    Some(v) => format!("{:.6}", v.as_f64()),
                    None => "nan".to_owned(),
                });
            }
            writer.write_record(&row)?;
        }
        writer.flush()
    }
}

/// Compute the tau matrix of `specs` over the graph.
pub fn tau_matrix<S: Real>(
    g: &BipartiteGraph,
    specs: &[MeasureSpec],
    scope: PairScope,
) -> Result<TauMatrix<S>, StatsError> {
    if specs.len() < 2 {
        return Err(StatsError::TooFewMeasures(specs.len()));
    }
    let pairs: Vec<(PersonRef, PersonRef)> = match scope {
        PairScope::Ties => g.all_ties(),
        PairScope::AllPairs => {
            let people: Vec<PersonRef> = g.people().collect();
            let mut out = Vec::new();
            for (i, &a) in people.iter().enumerate() {
                for &b in &people[i + 1..] {
                    out.push((a, b));
                }
            }
            out
        }
    };
    if pairs.len() < 2 {
        return Err(StatsError::TooFewKeys(pairs.len()));
    }
    let columns: Vec<Result<Vec<S>, String>> = specs
        .iter()
        .map(|spec| {
            score_pairs::<S>(g, spec, &pairs)
                .map(|table| {
                    pairs
                        .iter()
                        .map(|&(u, v)| table.get(g.person_label(u), g.person_label(v)))
                        .collect()
                })
                .map_err(|e| e.to_string())
        })
        .collect();
    let n = specs.len();
    let mut cells = vec![vec![None; n]; n];
    for i in 0..n {
        if columns[i].is_ok() {
            cells[i][i] = Some(S::one());
        }
        for j in i + 1..n {
            if let (Ok(x), Ok(y)) = (&columns[i], &columns[j]) {
                let mut aligned: Vec<(S, S)> =
                    x.iter().copied().zip(y.iter().copied()).collect();
                let tau = kendall_tau_pairs(&mut aligned)?;
                cells[i][j] = Some(tau);
                cells[j][i] = Some(tau);
            }
        }
    }
    Ok(TauMatrix {
        measures: specs.iter().map(|s| s.kind).collect(),
        cells,
        failures: columns
            .into_iter()
            .map(|c| c.err())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::EventRecord;
    use rand::{Rng, SeedableRng};

    fn table(entries: &[(&str, f64)]) -> TieScoreTable<f64> {
        let mut t = TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        for (i, &(_, s)) in entries.iter().enumerate() {
            t.insert(&format!("a{i}"), &format!("b{i}"), s);
        }
        t
    }

    // Quadratic oracle: classify every pair of keys by direct comparison and
    // apply the tau-b formula with concordant/discordant/single-sided tie
    // counts.
    fn tau_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut concordant, mut discordant, mut tied_x_only, mut tied_y_only) =
            (0_u64, 0_u64, 0_u64, 0_u64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = x[i].partial_cmp(&x[j]).unwrap();
                let dy = y[i].partial_cmp(&y[j]).unwrap();
                use std::cmp::Ordering::Equal;
                match (dx, dy) {
                    (Equal, Equal) => {}
                    (Equal, _) => tied_x_only += 1,
                    (_, Equal) => tied_y_only += 1,
                    (a, b) if a == b => concordant += 1,
                    _ => discordant += 1,
                }
            }
        }
        let pool = concordant + discordant;
        if pool + tied_x_only == 0 || pool + tied_y_only == 0 {
            return 0.0;
        }
        (concordant as f64 - discordant as f64)
            / (((pool + tied_x_only) as f64) * ((pool + tied_y_only) as f64)).sqrt()
    }

    #[test]
    fn identical_tables_give_one() {
        let t = table(&[("", 1.0), ("", 2.0), ("", 3.0)]);
        assert_eq!(kendall_tau(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn reversed_rankings_give_minus_one() {
        let a = table(&[("", 1.0), ("", 2.0), ("", 3.0), ("", 4.0)]);
        let b = table(&[("", 4.0), ("", 3.0), ("", 2.0), ("", 1.0)]);
        assert_eq!(kendall_tau(&a, &b).unwrap(), -1.0);
    }

    #[test]
    fn constant_ranking_gives_zero() {
        let a = table(&[("", 1.0), ("", 1.0), ("", 1.0)]);
        let b = table(&[("", 1.0), ("", 2.0), ("", 3.0)]);
        assert_eq!(kendall_tau(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn union_alignment_reads_missing_entries_as_zero() {
        let mut a = TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        a.insert("u", "v", 2.0);
        a.insert("u", "w", 1.0);
        let mut b = TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        b.insert("u", "v", 3.0);
        b.insert("x", "y", 1.0);
        // Union keys: (u,v), (u,w), (x,y); a = [2,1,0], b = [3,0,1].
        let tau: f64 = kendall_tau(&a, &b).unwrap();
        let oracle = tau_oracle(&[2.0, 1.0, 0.0], &[3.0, 0.0, 1.0]);
        assert_eq!(tau, oracle);
    }

    #[test]
    fn too_few_keys_rejected() {
        let a = table(&[("", 1.0)]);
        assert!(matches!(
            kendall_tau(&a, &a),
            Err(StatsError::TooFewKeys(1))
        ));
    }

    #[test]
    fn fast_path_matches_quadratic_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..60 {
            let n = rng.gen_range(2..=200);
            // Coarse integer scores in half the rounds force heavy ties.
            let coarse = round % 2 == 0;
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
                if coarse {
                    rng.gen_range(0..5) as f64
                } else {
                    rng.gen_range(0.0..1.0)
                }
            };
            let x: Vec<f64> = (0..n).map(|_| sample(&mut rng)).collect();
            let y: Vec<f64> = (0..n).map(|_| sample(&mut rng)).collect();
            let mut pairs: Vec<(f64, f64)> =
                x.iter().copied().zip(y.iter().copied()).collect();
            let fast: f64 = kendall_tau_pairs(&mut pairs).unwrap();
            let oracle = tau_oracle(&x, &y);
            assert!((fast - oracle).abs() < 1e-12, "{fast} vs {oracle}");
        }
    }

    #[test]
    fn tau_invariant_under_strictly_increasing_transform() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..150).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..150).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut plain: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        let mut cubed: Vec<(f64, f64)> = x
            .iter()
            .map(|v| v * v * v)
            .zip(y.iter().copied())
            .collect();
        let a: f64 = kendall_tau_pairs(&mut plain).unwrap();
        let b: f64 = kendall_tau_pairs(&mut cubed).unwrap();
        assert_eq!(a, b);
    }

    fn ev(id: &str, people: &[&str]) -> EventRecord {
        EventRecord {
            event_id: id.into(),
            time: None,
            participants: people.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn matrix_of_identical_measures_is_all_ones() {
        let g = build_graph(&[ev("A", &["u", "v", "w"]), ev("B", &["u", "v"])]).unwrap();
        let specs = vec![
            MeasureSpec::new(MeasureKind::Delta).unwrap(),
            MeasureSpec::new(MeasureKind::Delta).unwrap(),
        ];
        let m: TauMatrix<f64> = tau_matrix(&g, &specs, PairScope::Ties).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.cell(i, j), Some(1.0));
            }
        }
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let g = build_graph(&[
            ev("A", &["u", "v", "w"]),
            ev("B", &["u", "v"]),
            ev("C", &["v", "w", "x"]),
            ev("D", &["u", "x"]),
        ])
        .unwrap();
        let specs: Vec<MeasureSpec> = [
            MeasureKind::Common,
            MeasureKind::Jaccard,
            MeasureKind::Linear,
            MeasureKind::Preferential,
        ]
        .iter()
        .map(|&k| MeasureSpec::new(k).unwrap())
        .collect();
        let m: TauMatrix<f64> = tau_matrix(&g, &specs, PairScope::Ties).unwrap();
        for i in 0..specs.len() {
            assert_eq!(m.cell(i, i), Some(1.0));
            for j in 0..specs.len() {
                assert_eq!(m.cell(i, j), m.cell(j, i));
                let v = m.cell(i, j).unwrap();
                assert!((-1.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn matrix_failure_annotates_row_and_column() {
        // The temporal measure fails without timestamps; the rest survive.
        let g = build_graph(&[ev("A", &["u", "v"]), ev("B", &["u", "v", "w"])]).unwrap();
        let specs = vec![
            MeasureSpec::new(MeasureKind::Common).unwrap(),
            MeasureSpec::new(MeasureKind::TemporalProportional).unwrap(),
            MeasureSpec::new(MeasureKind::Linear).unwrap(),
        ];
        let m: TauMatrix<f64> = tau_matrix(&g, &specs, PairScope::Ties).unwrap();
        assert!(m.failure(1).is_some());
        assert_eq!(m.cell(0, 1), None);
        assert_eq!(m.cell(1, 1), None);
        assert_eq!(m.cell(1, 2), None);
        assert!(m.cell(0, 2).is_some());
    }

    #[test]
    fn eleven_measure_matrix_on_generated_graph() {
        use rand::seq::SliceRandom;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let people: Vec<String> = (0..25).map(|i| format!("p{i}")).collect();
        let events: Vec<EventRecord> = (0..500)
            .map(|i| {
                let size = rng.gen_range(2..=4);
                let mut chosen: Vec<&String> = people.iter().collect();
                chosen.shuffle(&mut rng);
                chosen.truncate(size);
                EventRecord {
                    event_id: format!("E{i}"),
                    time: Some(i as i64),
                    participants: chosen.into_iter().cloned().collect(),
                }
            })
            .collect();
        let g = build_graph(&events).unwrap();
        let specs: Vec<MeasureSpec> = MeasureKind::non_temporal()
            .iter()
            .map(|&k| MeasureSpec::new(k).unwrap())
            .collect();
        let m: TauMatrix<f64> = tau_matrix(&g, &specs, PairScope::Ties).unwrap();
        for i in 0..specs.len() {
            assert_eq!(m.cell(i, i), Some(1.0), "{}", specs[i].kind);
            for j in 0..specs.len() {
                let v = m.cell(i, j).expect("no failures expected").as_f64();
                assert!((-1.0..=1.0).contains(&v));
            }
        }
        // Spot-check two entries against the quadratic oracle.
        let pairs = g.all_ties();
        let col = |kind: MeasureKind| -> Vec<f64> {
            let spec = MeasureSpec::new(kind).unwrap();
            let t = score_pairs::<f64>(&g, &spec, &pairs).unwrap();
            pairs
                .iter()
                .map(|&(u, v)| t.get(g.person_label(u), g.person_label(v)))
                .collect()
        };
        let checks = [
            (0, 2, MeasureKind::Common, MeasureKind::Delta),
            (4, 9, MeasureKind::Linear, MeasureKind::Max),
        ];
        for (i, j, a, b) in checks {
            let oracle = tau_oracle(&col(a), &col(b));
            let fast = m.cell(i, j).unwrap();
            assert!((fast - oracle).abs() < 1e-12, "{a}/{b}: {fast} vs {oracle}");
        }
    }
}
