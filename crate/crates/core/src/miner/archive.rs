//! Line-delimited JSON archive of review rounds.
//!
//! Each line holds one [`ReviewRound`] plus a top-level `schema_version`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{MinerError, ReviewRound};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct RecordOut<'a> {
    schema_version: u32,
    #[serde(flatten)]
    round: &'a ReviewRound,
}

#[derive(Deserialize)]
struct RecordIn {
    #[allow(dead_code)]
    schema_version: u32,
    #[serde(flatten)]
    round: ReviewRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    /// Any malformed line is an error.
    #[default]
    Strict,
    /// Malformed lines are skipped and reported.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub rounds: Vec<ReviewRound>,
    pub skipped: Vec<SkippedLine>,
}

/// Writes one line per round. Returns the number of rounds written.
pub fn persist_rounds<W: Write>(rounds: &[ReviewRound], mut sink: W) -> Result<usize, MinerError> {
    for round in rounds {
        let line = serde_json::to_string(&RecordOut {
            schema_version: SCHEMA_VERSION,
            round,
        })
        .map_err(|e| MinerError::Archive {
            line: 0,
            reason: e.to_string(),
        })?;
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(rounds.len())
}

/// Reads an archive. A record with another schema version is always an
/// error, whatever the mode.
pub fn load_rounds<R: BufRead>(source: R, mode: LoadMode) -> Result<LoadReport, MinerError> {
    let mut report = LoadReport::default();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(round) => report.rounds.push(round),
            Err(e @ MinerError::SchemaVersion { .. }) => return Err(e),
            Err(MinerError::Archive { reason, .. }) if mode == LoadMode::Lenient => {
                log::warn!("skipping archive line {line_no}: {reason}");
                report.skipped.push(SkippedLine {
                    line: line_no,
                    reason,
                });
            }
            Err(MinerError::Archive { reason, .. }) => {
                return Err(MinerError::Archive {
                    line: line_no,
                    reason,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn parse_line(line: &str) -> Result<ReviewRound, MinerError> {
    let corrupt = |reason: String| MinerError::Archive { line: 0, reason };
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
    match value.get("schema_version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(MinerError::SchemaVersion {
                found: v,
                expected: SCHEMA_VERSION,
            })
        }
        None => return Err(corrupt("missing schema_version".into())),
    }
    let record: RecordIn = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    record.round.check().map_err(corrupt)?;
    Ok(record.round)
}
