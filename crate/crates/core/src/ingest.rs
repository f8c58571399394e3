//! Outage record ingestion.
//!
//! The canonical file is comma-delimited with a header row naming the
//! columns `outage_id,start,end,cause_code,forced,momentary`. Timestamps are
//! local time written `YYYY-MM-DD HH:MM`; seconds, when present, are
//! truncated on read. Booleans accept `true/false`, `t/f`, `yes/no`, `y/n`
//! and `1/0` in any case and are always written as `true`/`false`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use chrono::{NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamp layout of every file this crate reads or writes.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M";

/// One forced or planned line outage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageRecord {
    pub outage_id: String,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub cause_code: String,
    pub forced: bool,
    pub momentary: bool,
}

/// Coarse cause classes used for decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CauseGroup {
    Tree,
    Weather,
    Other,
}

impl CauseGroup {
    pub const ALL: [CauseGroup; 3] = [CauseGroup::Tree, CauseGroup::Weather, CauseGroup::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            CauseGroup::Tree => "tree",
            CauseGroup::Weather => "weather",
            CauseGroup::Other => "other",
        }
    }
}

impl fmt::Display for CauseGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CauseGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tree" => Ok(CauseGroup::Tree),
            "weather" => Ok(CauseGroup::Weather),
            "other" => Ok(CauseGroup::Other),
            other => Err(format!("unknown cause group `{other}`")),
        }
    }
}

/// Raw cause code to cause group. Codes not listed fall into `other`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CauseGrouping {
    map: HashMap<String, CauseGroup>,
}

impl CauseGrouping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, code: impl Into<String>, group: CauseGroup) {
        self.map.insert(code.into(), group);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn group_of(&self, code: &str) -> CauseGroup {
        self.map.get(code.trim()).copied().unwrap_or(CauseGroup::Other)
    }

    pub fn is_mapped(&self, code: &str) -> bool {
        self.map.contains_key(code.trim())
    }

    /// Distinct codes in `records` with no entry in the mapping.
    pub fn unmapped_codes<'a>(&self, records: impl IntoIterator<Item = &'a OutageRecord>) -> BTreeSet<String> {
        records
            .into_iter()
            .filter(|r| !self.is_mapped(&r.cause_code))
            .map(|r| r.cause_code.trim().to_string())
            .collect()
    }

    /// Reads `raw_code -> group` lines. Blank lines and lines starting with
    /// `#` are skipped; `→` is accepted in place of `->`.
    pub fn read<R: Read>(source: R) -> Result<Self> {
        let mut grouping = Self::new();
        for (idx, line) in BufReader::new(source).lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (code, group) = trimmed
                .split_once("->")
                .or_else(|| trimmed.split_once('→'))
                .ok_or_else(|| Error::GroupingLine {
                    line: lineno,
                    reason: "expected `raw_code -> group`".into(),
                })?;
            let code = code.trim();
            if code.is_empty() {
                return Err(Error::GroupingLine {
                    line: lineno,
                    reason: "empty cause code".into(),
                });
            }
            let group = group
                .parse::<CauseGroup>()
                .map_err(|reason| Error::GroupingLine { line: lineno, reason })?;
            if grouping.map.insert(code.to_string(), group).is_some_and(|g| g != group) {
                return Err(Error::GroupingLine {
                    line: lineno,
                    reason: format!("code `{code}` mapped twice to different groups"),
                });
            }
        }
        Ok(grouping)
    }

    /// Writes the mapping sorted by code.
    pub fn write<W: Write>(&self, mut sink: W) -> Result<()> {
        let mut entries: Vec<_> = self.map.iter().collect();
        entries.sort();
        for (code, group) in entries {
            writeln!(sink, "{code} -> {group}")?;
        }
        Ok(())
    }
}

/// Which header names hold each canonical field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub outage_id: String,
    pub start: String,
    pub end: String,
    pub cause_code: String,
    pub forced: String,
    pub momentary: String,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            outage_id: "outage_id".into(),
            start: "start".into(),
            end: "end".into(),
            cause_code: "cause_code".into(),
            forced: "forced".into(),
            momentary: "momentary".into(),
        }
    }
}

impl Schema {
    /// Overrides one field's column name. `field` is a canonical name.
    pub fn set(&mut self, field: &str, column: impl Into<String>) -> Result<()> {
        let slot = match field {
            "outage_id" => &mut self.outage_id,
            "start" => &mut self.start,
            "end" => &mut self.end,
            "cause_code" => &mut self.cause_code,
            "forced" => &mut self.forced,
            "momentary" => &mut self.momentary,
            other => return Err(Error::InvalidArgument(format!("unknown schema field `{other}`"))),
        };
        *slot = column.into();
        Ok(())
    }

    fn columns(&self) -> [&str; 6] {
        [
            &self.outage_id,
            &self.start,
            &self.end,
            &self.cause_code,
            &self.forced,
            &self.momentary,
        ]
    }
}

/// A row that failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReject {
    /// 1-based line number in the source, header included.
    pub line: u64,
    pub reason: String,
}

impl fmt::Display for RowReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedOutages {
    pub records: Vec<OutageRecord>,
    pub rejects: Vec<RowReject>,
}

pub fn parse_timestamp(raw: &str) -> std::result::Result<NaiveDateTime, String> {
    let raw = raw.trim();
    let parsed = NaiveDateTime::parse_from_str(raw, TIMESTAMP_FORMAT)
        .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S"))
        .map_err(|e| format!("malformed timestamp `{raw}`: {e}"))?;
    Ok(parsed
        .with_second(0)
        .and_then(|t| t.with_nanosecond(0))
        .expect("zero seconds is always valid"))
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

pub(crate) fn parse_bool(raw: &str) -> std::result::Result<bool, String> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "t" | "yes" | "y" | "1" => Ok(true),
        "false" | "f" | "no" | "n" | "0" => Ok(false),
        other => Err(format!("malformed boolean `{other}`")),
    }
}

/// Parses delimited outage rows. Bad rows are rejected with their line
/// number; the whole parse fails when more than half of the rows are bad
/// or a required column is absent from the header.
pub fn parse_outages<R: Read>(source: R, schema: &Schema) -> Result<ParsedOutages> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let mut index = [0usize; 6];
    for (slot, name) in index.iter_mut().zip(schema.columns()) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let names = schema.columns();

    let mut out = ParsedOutages::default();
    let mut seen_ids = HashSet::new();
    let mut total = 0usize;
    for row in reader.records() {
        total += 1;
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.rejects.push(RowReject {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let parsed = (|| -> std::result::Result<OutageRecord, String> {
            let mut fields = [""; 6];
            for (k, &col) in index.iter().enumerate() {
                fields[k] = row
                    .get(col)
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| format!("missing value for column `{}`", names[k]))?;
            }
            let start = parse_timestamp(fields[1])?;
            let end = parse_timestamp(fields[2])?;
            if end < start {
                return Err(format!("end {} precedes start {}", fields[2], fields[1]));
            }
            Ok(OutageRecord {
                outage_id: fields[0].to_string(),
                start,
                end,
                cause_code: fields[3].to_string(),
                forced: parse_bool(fields[4])?,
                momentary: parse_bool(fields[5])?,
            })
        })();
        match parsed {
            Ok(record) if !seen_ids.insert(record.outage_id.clone()) => out.rejects.push(RowReject {
                line,
                reason: format!("duplicate outage_id `{}`", record.outage_id),
            }),
            Ok(record) => out.records.push(record),
            Err(reason) => out.rejects.push(RowReject { line, reason }),
        }
    }
    if out.rejects.len() * 2 > total {
        return Err(Error::TooManyRejects {
            rejected: out.rejects.len(),
            total,
        });
    }
    Ok(out)
}

/// Writes records in the canonical format.
pub fn write_outages<W: Write>(records: &[OutageRecord], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["outage_id", "start", "end", "cause_code", "forced", "momentary"])?;
    for r in records {
        writer.write_record([
            r.outage_id.as_str(),
            &format_timestamp(&r.start),
            &format_timestamp(&r.end),
            r.cause_code.as_str(),
            if r.forced { "true" } else { "false" },
            if r.momentary { "true" } else { "false" },
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Forced outages only; momentary outages stay.
pub fn filter_forced(records: &[OutageRecord]) -> Vec<OutageRecord> {
    records.iter().filter(|r| r.forced).cloned().collect()
}
