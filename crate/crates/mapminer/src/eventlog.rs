//! Event-log ingestion: delimited text in, cases and integer-encoded
//! activity sequences out.
//!
//! A log is a set of *cases* (process instances). Each case is the
//! time-ordered sequence of events sharing one case id. Activities are
//! interned into a [`Vocabulary`] that assigns dense integer ids in
//! descending frequency order (ties broken alphabetically), so two parses
//! of the same file always produce identical encodings.

use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column mapping and parsing configuration for delimited event logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    /// Field delimiter, default `;`.
    pub delimiter: u8,
    /// Header name of the case-id column.
    pub case_column: String,
    /// Header name of the timestamp column.
    pub timestamp_column: String,
    /// Header name of the activity column.
    pub activity_column: String,
    /// Header name of the actor/assignment-group column.
    pub group_column: String,
    /// chrono format string for timestamps, default day-first `%d/%m/%Y %H:%M`.
    pub timestamp_format: String,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            delimiter: b';',
            case_column: "Incident ID".to_string(),
            timestamp_column: "DateStamp".to_string(),
            activity_column: "IncidentActivity_Type".to_string(),
            group_column: "Assignment Group".to_string(),
            timestamp_format: "%d/%m/%Y %H:%M".to_string(),
        }
    }
}

/// One row of the log: an interaction of an actor with the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub case_id: String,
    pub timestamp: NaiveDateTime,
    pub activity: String,
    pub group: String,
}

/// All events of one process instance, sorted ascending by timestamp.
/// Events with equal timestamps keep their input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub case_id: String,
    pub events: Vec<Event>,
}

impl Case {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Bijection between activity labels and dense integer ids in `[0, M)`.
///
/// Ids are assigned in descending frequency order, ties alphabetical, so
/// the mapping is a deterministic function of the event multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Build a vocabulary from `(label, count)` pairs.
    pub fn from_counts(counts: &HashMap<String, usize>) -> Self {
        let mut ordered: Vec<(&String, &usize)> = counts.iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        let labels: Vec<String> = ordered.into_iter().map(|(l, _)| l.clone()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Vocabulary { labels, index }
    }

    /// Number of distinct activities, `M`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get(id).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Alphabetically ordered `label -> id` map, used by the model JSON export.
    pub fn to_map(&self) -> std::collections::BTreeMap<String, usize> {
        self.index.iter().map(|(l, i)| (l.clone(), *i)).collect()
    }
}

/// A parsed event log: cases in first-appearance order plus the activity
/// vocabulary. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub cases: Vec<Case>,
    pub vocabulary: Vocabulary,
    pub schema: ColumnSchema,
    /// Provenance of the input, when parsed from a file.
    pub source: Option<String>,
}

impl EventLog {
    /// Assemble a log from complete cases. Events inside each case are
    /// sorted (stably) by timestamp and the vocabulary is rebuilt.
    pub fn from_cases(mut cases: Vec<Case>, schema: ColumnSchema) -> Result<Self> {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for case in &mut cases {
            if case.events.is_empty() {
                return Err(Error::domain(format!(
                    "case `{}` has no events",
                    case.case_id
                )));
            }
            case.events.sort_by_key(|e| e.timestamp);
            for event in &case.events {
                *counts.entry(event.activity.clone()).or_insert(0) += 1;
            }
        }
        if cases.is_empty() {
            return Err(Error::EmptyLog);
        }
        Ok(EventLog {
            cases,
            vocabulary: Vocabulary::from_counts(&counts),
            schema,
            source: None,
        })
    }

    pub fn n_cases(&self) -> usize {
        self.cases.len()
    }

    pub fn n_events(&self) -> usize {
        self.cases.iter().map(Case::len).sum()
    }

    pub fn n_activities(&self) -> usize {
        self.vocabulary.len()
    }
}

/// One row of the activity histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub activity: String,
    pub count: usize,
    pub cumulative: f64,
}

/// Parse a delimited event log. Rows are grouped by case id (cases keep
/// first-appearance order) and sorted by timestamp within each case,
/// preserving input order on ties.
pub fn parse_log<R: Read>(reader: R, schema: &ColumnSchema) -> Result<EventLog> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(false)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let case_col = column(&schema.case_column)?;
    let ts_col = column(&schema.timestamp_column)?;
    let act_col = column(&schema.activity_column)?;
    let grp_col = column(&schema.group_column)?;

    let mut order: Vec<String> = Vec::new();
    let mut by_case: HashMap<String, Vec<Event>> = HashMap::new();

    // Physical row numbers are 1-based and count the header.
    let mut row: u64 = 1;
    for record in csv_reader.records() {
        row += 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::MalformedRow {
                row,
                message: format!("fewer than {} fields", idx + 1),
            })
        };
        let case_id = field(case_col)?.trim().to_string();
        let activity = field(act_col)?.trim().to_string();
        if activity.is_empty() {
            return Err(Error::MalformedRow {
                row,
                message: "empty activity".to_string(),
            });
        }
        let raw_ts = field(ts_col)?.trim();
        let timestamp =
            NaiveDateTime::parse_from_str(raw_ts, &schema.timestamp_format).map_err(|e| {
                Error::MalformedRow {
                    row,
                    message: format!("timestamp `{raw_ts}`: {e}"),
                }
            })?;
        let group = field(grp_col)?.trim().to_string();

        let events = by_case.entry(case_id.clone()).or_insert_with(|| {
            order.push(case_id.clone());
            Vec::new()
        });
        events.push(Event {
            case_id,
            timestamp,
            activity,
            group,
        });
    }

    if order.is_empty() {
        return Err(Error::EmptyLog);
    }

    let cases = order
        .into_iter()
        .map(|case_id| {
            let mut events = by_case.remove(&case_id).expect("case collected");
            events.sort_by_key(|e| e.timestamp);
            Case { case_id, events }
        })
        .collect();
    EventLog::from_cases(cases, schema.clone())
}

/// Re-emit a log in the same delimited format `parse_log` reads.
/// Round-tripping a parsed log yields an identical `EventLog`.
pub fn write_log<W: Write>(log: &EventLog, writer: W) -> Result<()> {
    let schema = &log.schema;
    let mut csv_writer = csv::WriterBuilder::new()
        .delimiter(schema.delimiter)
        .from_writer(writer);
    csv_writer.write_record([
        schema.case_column.as_str(),
        schema.timestamp_column.as_str(),
        schema.activity_column.as_str(),
        schema.group_column.as_str(),
    ])?;
    for case in &log.cases {
        for event in &case.events {
            csv_writer.write_record([
                event.case_id.as_str(),
                &event.timestamp.format(&schema.timestamp_format).to_string(),
                event.activity.as_str(),
                event.group.as_str(),
            ])?;
        }
    }
    csv_writer.flush()?;
    Ok(())
}

/// Encode every case as the integer sequence of its activity ids.
pub fn encode_cases(log: &EventLog) -> Vec<Vec<usize>> {
    log.cases
        .iter()
        .map(|case| {
            case.events
                .iter()
                .map(|e| {
                    log.vocabulary
                        .id(&e.activity)
                        .expect("every activity is in the vocabulary")
                })
                .collect()
        })
        .collect()
}

/// Activity frequencies in descending count order (ties alphabetical),
/// with the running cumulative fraction of all events.
pub fn activity_histogram(log: &EventLog) -> Result<Vec<HistogramEntry>> {
    let total = log.n_events();
    if total == 0 {
        return Err(Error::EmptyLog);
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for case in &log.cases {
        for event in &case.events {
            *counts.entry(event.activity.as_str()).or_insert(0) += 1;
        }
    }
    // The vocabulary order is exactly the histogram order.
    let mut cumulative = 0usize;
    Ok(log
        .vocabulary
        .labels()
        .iter()
        .map(|label| {
            let count = counts[label.as_str()];
            cumulative += count;
            HistogramEntry {
                activity: label.clone(),
                count,
                cumulative: cumulative as f64 / total as f64,
            }
        })
        .collect())
}
