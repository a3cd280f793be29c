//! Event-log ingestion and analysis-artifact export.
//!
//! Two input formats are supported: JSON Lines (one event object per line)
//! and CSV rows of `(event_id, person_label[, time])` grouped by event id.
//! Exports are byte-deterministic for a fixed input and measure spec.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::TieScoreTable;
use crate::scalar::Real;

/// One event of the input log: identifier, optional timestamp (opaque epoch
/// units, only their order matters), and participant labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<i64>,
    pub participants: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for EventFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown event format {other:?} (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed event: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Non-fatal conditions observed while parsing.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct IngestWarnings {
    /// Duplicate participant entries collapsed within single events.
    pub duplicate_participants: usize,
    /// Events kept despite an empty participant list.
    pub empty_events: usize,
}

/// Parse an event log. Event order follows the file; participants are
/// deduplicated per event with a warning counter.
pub fn parse_events(
    path: &Path,
    format: EventFormat,
) -> Result<(Vec<EventRecord>, IngestWarnings), IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_events_reader(file, format, &path.display().to_string())
}

pub fn parse_events_reader(
    reader: impl Read,
    format: EventFormat,
    path: &str,
) -> Result<(Vec<EventRecord>, IngestWarnings), IngestError> {
    match format {
        EventFormat::Jsonl => parse_jsonl(reader, path),
        EventFormat::Csv => parse_csv(reader, path),
    }
}

fn dedup_participants(record: &mut EventRecord, warnings: &mut IngestWarnings) {
    let mut seen = Vec::with_capacity(record.participants.len());
    record.participants.retain(|p| {
        if seen.contains(p) {
            warnings.duplicate_participants += 1;
            false
        } else {
            seen.push(p.clone());
            true
        }
    });
    if record.participants.is_empty() {
        warnings.empty_events += 1;
    }
}

fn parse_jsonl(
    reader: impl Read,
    path: &str,
) -> Result<(Vec<EventRecord>, IngestWarnings), IngestError> {
    let mut events = Vec::new();
    let mut warnings = IngestWarnings::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut record: EventRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::Malformed {
                path: path.to_owned(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        if record.event_id.is_empty() {
            return Err(IngestError::Malformed {
                path: path.to_owned(),
                line: idx + 1,
                message: "empty event_id".into(),
            });
        }
        dedup_participants(&mut record, &mut warnings);
        events.push(record);
    }
    Ok((events, warnings))
}

fn parse_csv(
    reader: impl Read,
    path: &str,
) -> Result<(Vec<EventRecord>, IngestWarnings), IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut order: Vec<String> = Vec::new();
    let mut by_id: HashMap<String, EventRecord> = HashMap::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let row = row.map_err(|e| IngestError::Malformed {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        // A literal header row is tolerated and skipped.
        if idx == 0 && row.get(0) == Some("event_id") {
            continue;
        }
        let event_id = row
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| IngestError::Malformed {
                path: path.to_owned(),
                line: idx + 1,
                message: "missing event_id column".into(),
            })?
            .to_owned();
        let person = row.get(1).unwrap_or("").to_owned();
        let time = match row.get(2) {
            None | Some("") => None,
            Some(raw) => Some(raw.parse::<i64>().map_err(|e| IngestError::Malformed {
                path: path.to_owned(),
                line: idx + 1,
                message: format!("bad time {raw:?}: {e}"),
            })?),
        };
        let record = by_id.entry(event_id.clone()).or_insert_with(|| {
            order.push(event_id.clone());
            EventRecord {
                event_id,
                time: None,
                participants: Vec::new(),
            }
        });
        if record.time.is_none() {
            record.time = time;
        }
        if !person.is_empty() {
            record.participants.push(person);
        }
    }
    let mut warnings = IngestWarnings::default();
    let mut events = Vec::with_capacity(order.len());
    for id in order {
        let mut record = by_id.remove(&id).expect("grouped event");
        dedup_participants(&mut record, &mut warnings);
        events.push(record);
    }
    Ok((events, warnings))
}

/// Format a float like C's `%.*g`: `sig` significant digits, trailing zeros
/// stripped, scientific notation outside the fixed-point range.
pub fn format_g(value: f64, sig: usize) -> String {
    if value == 0.0 {
        return "0".to_owned();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_trailing_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_trailing_zeros(&format!("{value:.decimals$}"))
    }
}

fn trim_trailing_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s.to_owned()
    }
}

/// Write a score table as CSV rows `(person_a, person_b, score)`, labels
/// ordered within each row and rows sorted, scores in `%.9g`.
pub fn export_edges<S: Real>(scores: &TieScoreTable<S>, path: &Path) -> Result<(), IngestError> {
    let mut out = open_writer(path)?;
    write_edges(scores, &mut out).map_err(|source| IngestError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_edges<S: Real, W: Write + ?Sized>(
    scores: &TieScoreTable<S>,
    out: &mut W,
) -> Result<(), std::io::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["person_a", "person_b", "score"])?;
    for ((a, b), score) in scores.iter() {
        writer.write_record([a, b, &format_g(score.as_f64(), 9)])?;
    }
    writer.flush()?;
    Ok(())
}

/// Write the inferred weighted network in DOT format. Edge pen widths scale
/// linearly with the score: `width_scale * score / max_score`.
///
/// Returns `true` if the table was empty (an empty graph is still written).
pub fn export_dot<S: Real>(
    scores: &TieScoreTable<S>,
    path: &Path,
    width_scale: f64,
) -> Result<bool, IngestError> {
    let mut out = open_writer(path)?;
    write_dot(scores, &mut out, width_scale).map_err(|source| IngestError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_dot<S: Real, W: Write + ?Sized>(
    scores: &TieScoreTable<S>,
    out: &mut W,
    width_scale: f64,
) -> Result<bool, std::io::Error> {
    assert!(width_scale > 0.0, "width_scale must be positive");
    writeln!(out, "graph ties {{")?;
    let max_score = scores
        .iter()
        .map(|(_, s)| s.as_f64())
        .fold(0.0_f64, f64::max);
    for ((a, b), score) in scores.iter() {
        let width = if max_score > 0.0 {
            width_scale * score.as_f64() / max_score
        } else {
            0.0
        };
        writeln!(
            out,
            "  {} -- {} [penwidth={}];",
            dot_quote(a),
            dot_quote(b),
            format_g(width, 6)
        )?;
    }
    writeln!(out, "}}")?;
    Ok(scores.is_empty())
}

fn dot_quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

fn open_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, IngestError> {
    let file = std::fs::File::create(path).map_err(|source| IngestError::Write {
        path: path.display().to_string(),
        source,
    })?;
    Ok(std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{MeasureKind, MeasureSpec};

    #[test]
    fn jsonl_single_line() {
        let input = r#"{"event_id":"P1","participants":["u","v"]}"#;
        let (events, warnings) =
            parse_events_reader(input.as_bytes(), EventFormat::Jsonl, "mem").unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].participants, vec!["u", "v"]);
        assert_eq!(warnings, IngestWarnings::default());
    }

    #[test]
    fn jsonl_malformed_line_reports_number() {
        let input = "{\"event_id\":\"P1\",\"participants\":[\"u\"]}\nnot json\n";
        let err = parse_events_reader(input.as_bytes(), EventFormat::Jsonl, "mem").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 2, .. }));
    }

    #[test]
    fn jsonl_empty_participants_kept_with_warning() {
        let input = r#"{"event_id":"P1","participants":[]}"#;
        let (events, warnings) =
            parse_events_reader(input.as_bytes(), EventFormat::Jsonl, "mem").unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(warnings.empty_events, 1);
    }

    #[test]
    fn csv_groups_and_dedups() {
        let input = "P1,u\nP1,v\nP1,u\n";
        let (events, warnings) =
            parse_events_reader(input.as_bytes(), EventFormat::Csv, "mem").unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].participants, vec!["u", "v"]);
        assert_eq!(warnings.duplicate_participants, 1);
    }

    #[test]
    fn csv_time_column_and_header() {
        let input = "event_id,person,time\nP1,u,5\nP1,v,5\nP2,u,3\n";
        let (events, _) = parse_events_reader(input.as_bytes(), EventFormat::Csv, "mem").unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].time, Some(5));
        assert_eq!(events[1].time, Some(3));
    }

    #[test]
    fn empty_file_parses_to_nothing() {
        for format in [EventFormat::Jsonl, EventFormat::Csv] {
            let (events, _) = parse_events_reader(&b""[..], format, "mem").unwrap();
            assert!(events.is_empty());
        }
    }

    #[test]
    fn format_g_matches_c_conventions() {
        assert_eq!(format_g(1.0, 9), "1");
        assert_eq!(format_g(0.5, 9), "0.5");
        assert_eq!(format_g(2.0, 6), "2");
        assert_eq!(format_g(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_g(0.0, 9), "0");
        assert_eq!(format_g(1e-5, 9), "1e-05");
        assert_eq!(format_g(1.5e9, 9), "1.5e+09");
        assert_eq!(format_g(-0.25, 9), "-0.25");
        assert_eq!(format_g(123456789.0, 9), "123456789");
    }

    fn table(entries: &[(&str, &str, f64)]) -> TieScoreTable<f64> {
        let mut t = TieScoreTable::new(MeasureSpec::new(MeasureKind::Common).unwrap());
        for &(a, b, s) in entries {
            t.insert(a, b, s);
        }
        t
    }

    #[test]
    fn edges_single_row() {
        let mut out = Vec::new();
        write_edges(&table(&[("v", "u", 1.0)]), &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "person_a,person_b,score\nu,v,1\n"
        );
    }

    #[test]
    fn edges_empty_table_header_only() {
        let mut out = Vec::new();
        write_edges(&table(&[]), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "person_a,person_b,score\n");
    }

    #[test]
    fn edges_sorted_lexicographically() {
        let mut out = Vec::new();
        write_edges(
            &table(&[("c", "a", 0.5), ("b", "a", 2.0), ("c", "b", 0.25)]),
            &mut out,
        )
        .unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows, vec!["a,b,2", "a,c,0.5", "b,c,0.25"]);
    }

    #[test]
    fn dot_widths_scale_linearly() {
        let mut out = Vec::new();
        write_dot(&table(&[("a", "b", 1.0), ("a", "c", 2.0)]), &mut out, 4.0).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"a\" -- \"b\" [penwidth=2];"), "{text}");
        assert!(text.contains("\"a\" -- \"c\" [penwidth=4];"), "{text}");
    }

    #[test]
    fn dot_uniform_scores_uniform_widths() {
        let mut out = Vec::new();
        write_dot(
            &table(&[("a", "b", 0.7), ("a", "c", 0.7), ("b", "c", 0.7)]),
            &mut out,
            3.0,
        )
        .unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("penwidth=3]").count(), 3);
    }

    #[test]
    fn dot_widest_edge_is_the_top_scoring_pair() {
        use crate::graph::build_graph;
        use crate::measures::score_all;

        // Two leads co-star constantly; everyone else drifts through crowds.
        let events: Vec<EventRecord> = vec![
            EventRecord {
                event_id: "s1".into(),
                time: None,
                participants: vec!["lead_a".into(), "lead_b".into()],
            },
            EventRecord {
                event_id: "s2".into(),
                time: None,
                participants: vec!["lead_a".into(), "lead_b".into()],
            },
            EventRecord {
                event_id: "s3".into(),
                time: None,
                participants: vec!["lead_a".into(), "lead_b".into(), "sage".into()],
            },
            EventRecord {
                event_id: "s4".into(),
                time: None,
                participants: vec!["sage".into(), "guard".into(), "page".into(), "cook".into()],
            },
            EventRecord {
                event_id: "s5".into(),
                time: None,
                participants: vec!["guard".into(), "page".into()],
            },
        ];
        let g = build_graph(&events).unwrap();
        let table = score_all::<f64>(&g, &MeasureSpec::new(MeasureKind::Linear).unwrap()).unwrap();
        let top_pair = table
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(k, _)| k.clone())
            .unwrap();

        let mut out = Vec::new();
        write_dot(&table, &mut out, 4.0).unwrap();
        let text = String::from_utf8(out).unwrap();
        let widest = text
            .lines()
            .filter_map(|line| {
                let width: f64 = line.split("penwidth=").nth(1)?.trim_end_matches("];").parse().ok()?;
                Some((line.to_owned(), width))
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert!(
            widest.0.contains(&format!("\"{}\"", top_pair.0))
                && widest.0.contains(&format!("\"{}\"", top_pair.1)),
            "widest edge {widest:?} is not the top pair {top_pair:?}"
        );
        assert_eq!(widest.1, 4.0);
    }

    #[test]
    fn dot_empty_table_flagged() {
        let mut out = Vec::new();
        let empty = write_dot(&table(&[]), &mut out, 1.0).unwrap();
        assert!(empty);
        assert_eq!(String::from_utf8(out).unwrap(), "graph ties {\n}\n");
    }
}
