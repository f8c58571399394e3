//! Grouping forced outages into resilience events.
//!
//! Outages are chained in start order: an outage joins the current event
//! when it starts no later than the latest end seen in that event plus the
//! gap tolerance; otherwise it opens a new event. With a zero tolerance this
//! groups chains of overlapping or abutting outages.
//!
//! This chaining rule is a configurable stand-in for timing-based event
//! extraction; it is not claimed to match any particular published grouping
//! algorithm.
//!
//! Catalog export format: comma-delimited with header
//! `event_id,size_N,start,end,season,cause_group,tie_flag`, one row per
//! event, timestamps as in [`crate::ingest::TIMESTAMP_FORMAT`], season
//! `summer`/`non_summer`, cause group `tree`/`weather`/`other`, tie flag
//! `true`/`false`.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, parse_bool, parse_timestamp, CauseGroup, CauseGrouping, OutageRecord};

/// Minutes in a Julian year (365.25 days).
pub const JULIAN_YEAR_MINUTES: f64 = 525_960.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Summer,
    NonSummer,
}

impl Season {
    pub const ALL: [Season; 2] = [Season::Summer, Season::NonSummer];

    pub fn as_str(self) -> &'static str {
        match self {
            Season::Summer => "summer",
            Season::NonSummer => "non_summer",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Season {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "summer" => Ok(Season::Summer),
            "non_summer" => Ok(Season::NonSummer),
            other => Err(format!("unknown season `{other}`")),
        }
    }
}

/// Months counted as summer; June through September by default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummerMonths(BTreeSet<u32>);

impl SummerMonths {
    pub fn new(months: impl IntoIterator<Item = u32>) -> Result<Self> {
        let set: BTreeSet<u32> = months.into_iter().collect();
        if let Some(bad) = set.iter().find(|m| !(1..=12).contains(*m)) {
            return Err(Error::InvalidArgument(format!("month {bad} is outside 1..=12")));
        }
        Ok(Self(set))
    }

    pub fn contains(&self, month: u32) -> bool {
        self.0.contains(&month)
    }
}

impl Default for SummerMonths {
    fn default() -> Self {
        Self([6, 7, 8, 9].into_iter().collect())
    }
}

impl FromStr for SummerMonths {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let months = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidArgument(format!("bad month `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(months)
    }
}

/// How far past the running end of an event a new outage may start and
/// still join it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapTolerance {
    Minutes(u64),
    Unbounded,
}

impl Default for GapTolerance {
    fn default() -> Self {
        GapTolerance::ZERO
    }
}

impl GapTolerance {
    pub const ZERO: GapTolerance = GapTolerance::Minutes(0);

    pub fn minutes(self) -> Option<u64> {
        match self {
            GapTolerance::Minutes(m) => Some(m),
            GapTolerance::Unbounded => None,
        }
    }

    fn admits(self, start: NaiveDateTime, running_end: NaiveDateTime) -> bool {
        match self.minutes() {
            None => true,
            Some(m) => {
                let reach = i64::try_from(m)
                    .ok()
                    .and_then(Duration::try_minutes)
                    .and_then(|d| running_end.checked_add_signed(d));
                reach.is_none_or(|limit| start <= limit)
            }
        }
    }
}

impl fmt::Display for GapTolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.minutes() {
            Some(m) => write!(f, "{m}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for GapTolerance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "unbounded" => Ok(GapTolerance::Unbounded),
            other => other
                .parse::<u64>()
                .map(GapTolerance::Minutes)
                .map_err(|_| Error::InvalidArgument(format!("bad gap tolerance `{other}`"))),
        }
    }
}

/// A maximal group of temporally bunched forced outages.
#[derive(Debug, Clone, PartialEq)]
pub struct ResilienceEvent {
    pub event_id: u64,
    /// Member outage ids; empty when membership is unknown (catalogs read
    /// from the export file, synthetic catalogs).
    pub outage_ids: Vec<String>,
    /// Number of outages `N`.
    pub size: u64,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub season: Season,
    pub cause_group: CauseGroup,
    pub tie_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventCatalog {
    pub events: Vec<ResilienceEvent>,
    /// Observation span in years.
    pub n_year: f64,
    /// `None` when the catalog was not built by grouping.
    pub gap_tolerance: Option<GapTolerance>,
    pub source_record_count: u64,
}

impl EventCatalog {
    /// Catalog from ready-made events; events are sorted by start and
    /// renumbered from 1.
    pub fn from_events(mut events: Vec<ResilienceEvent>, n_year: f64) -> Result<Self> {
        if !(n_year > 0.0) || !n_year.is_finite() {
            return Err(Error::InvalidArgument(format!("n_year must be positive, got {n_year}")));
        }
        if let Some(e) = events.iter().find(|e| e.size == 0 || e.end < e.start) {
            return Err(Error::InvalidArgument(format!(
                "event {} has size {} and span {} .. {}",
                e.event_id, e.size, e.start, e.end
            )));
        }
        events.sort_by_key(|e| (e.start, e.end, e.event_id));
        for (i, e) in events.iter_mut().enumerate() {
            e.event_id = i as u64 + 1;
        }
        let source_record_count = events.iter().map(|e| e.size).sum();
        Ok(Self {
            events,
            n_year,
            gap_tolerance: None,
            source_record_count,
        })
    }

    /// Catalog of bare sizes: events one minute apart from 2011-01-01,
    /// tagged non-summer and other.
    pub fn from_sizes(sizes: &[u64], n_year: f64) -> Result<Self> {
        let origin = NaiveDate::from_ymd_opt(2011, 1, 1)
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .expect("valid origin");
        let events = sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| {
                let start = origin + Duration::minutes(i as i64);
                ResilienceEvent {
                    event_id: i as u64 + 1,
                    outage_ids: Vec::new(),
                    size,
                    start,
                    end: start,
                    season: Season::NonSummer,
                    cause_group: CauseGroup::Other,
                    tie_flag: false,
                }
            })
            .collect();
        Self::from_events(events, n_year)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Sizes in event order.
    pub fn sizes(&self) -> impl Iterator<Item = u64> + '_ {
        self.events.iter().map(|e| e.size)
    }

    /// Sub-catalog of the events matching `keep`, with the same `n_year`.
    pub fn subset(&self, keep: impl Fn(&ResilienceEvent) -> bool) -> Self {
        let events: Vec<_> = self.events.iter().filter(|e| keep(e)).cloned().collect();
        Self {
            source_record_count: events.iter().map(|e| e.size).sum(),
            events,
            n_year: self.n_year,
            gap_tolerance: self.gap_tolerance,
        }
    }

    /// Same events with a different observation span.
    pub fn with_n_year(mut self, n_year: f64) -> Result<Self> {
        if !(n_year > 0.0) || !n_year.is_finite() {
            return Err(Error::InvalidArgument(format!("n_year must be positive, got {n_year}")));
        }
        self.n_year = n_year;
        Ok(self)
    }

    /// Calendar years of the first and last event starts.
    pub fn year_range(&self) -> Option<(i32, i32)> {
        let first = self.events.first()?.start.year();
        let last = self.events.iter().map(|e| e.start.year()).max()?;
        Some((first, last))
    }

    pub fn write<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["event_id", "size_N", "start", "end", "season", "cause_group", "tie_flag"])?;
        for e in &self.events {
            w.write_record([
                e.event_id.to_string().as_str(),
                &e.size.to_string(),
                &format_timestamp(&e.start),
                &format_timestamp(&e.end),
                e.season.as_str(),
                e.cause_group.as_str(),
                if e.tie_flag { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an exported catalog. `n_year` falls back to the observed span
    /// when not declared.
    pub fn read<R: Read>(source: R, n_year: Option<f64>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let expected = ["event_id", "size_N", "start", "end", "season", "cause_group", "tie_flag"];
        let headers = reader.headers()?.clone();
        let mut index = [0usize; 7];
        for (slot, name) in index.iter_mut().zip(expected) {
            *slot = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        }
        let mut events = Vec::new();
        for row in reader.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line()) as usize;
            let bad = |reason: String| Error::CatalogLine { line, reason };
            let field = |k: usize| {
                row.get(index[k])
                    .ok_or_else(|| bad(format!("missing `{}`", expected[k])))
            };
            let event_id = field(0)?.parse::<u64>().map_err(|e| bad(format!("event_id: {e}")))?;
            let size = field(1)?.parse::<u64>().map_err(|e| bad(format!("size_N: {e}")))?;
            let start = parse_timestamp(field(2)?).map_err(bad)?;
            let end = parse_timestamp(field(3)?).map_err(bad)?;
            if size == 0 {
                return Err(bad("size_N must be positive".into()));
            }
            if end < start {
                return Err(bad("end precedes start".into()));
            }
            events.push(ResilienceEvent {
                event_id,
                outage_ids: Vec::new(),
                size,
                start,
                end,
                season: field(4)?.parse().map_err(bad)?,
                cause_group: field(5)?.parse().map_err(bad)?,
                tie_flag: parse_bool(field(6)?).map_err(bad)?,
            });
        }
        events.sort_by_key(|e| (e.start, e.end, e.event_id));
        let n_year = match n_year {
            Some(y) => y,
            None => observed_span_years(events.iter().map(|e| (e.start, e.end))),
        };
        let mut catalog = Self::from_events(Vec::new(), n_year)?;
        catalog.source_record_count = events.iter().map(|e| e.size).sum();
        catalog.events = events;
        Ok(catalog)
    }
}

/// Span from the first start to the last end in Julian years, floored at
/// one minute.
pub fn observed_span_years(spans: impl IntoIterator<Item = (NaiveDateTime, NaiveDateTime)>) -> f64 {
    let mut bounds: Option<(NaiveDateTime, NaiveDateTime)> = None;
    for (s, e) in spans {
        bounds = Some(match bounds {
            None => (s, e),
            Some((lo, hi)) => (lo.min(s), hi.max(e)),
        });
    }
    let minutes = bounds.map_or(0, |(lo, hi)| (hi - lo).num_minutes());
    minutes.max(1) as f64 / JULIAN_YEAR_MINUTES
}

/// Settings for [`group_events_with`].
#[derive(Debug, Clone, Default)]
pub struct EventOptions {
    pub gap: GapTolerance,
    pub summer_months: SummerMonths,
    pub grouping: CauseGrouping,
    /// Declared coverage period; the observed span is used when absent.
    pub n_year: Option<f64>,
}

/// Season of an event, by the month of its start.
pub fn tag_season(event: &ResilienceEvent, summer_months: &SummerMonths) -> Season {
    if summer_months.contains(event.start.month()) {
        Season::Summer
    } else {
        Season::NonSummer
    }
}

/// Plurality cause group of the members; ties resolve weather, then tree,
/// then other, and set the tie flag.
pub fn majority_cause(members: &[OutageRecord], grouping: &CauseGrouping) -> (CauseGroup, bool) {
    let mut counts = [0usize; 3];
    for m in members {
        counts[grouping.group_of(&m.cause_code) as usize] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0);
    let precedence = [CauseGroup::Weather, CauseGroup::Tree, CauseGroup::Other];
    let leaders: Vec<_> = precedence.iter().filter(|g| counts[**g as usize] == top).collect();
    (*leaders[0], leaders.len() > 1)
}

/// Groups with default options and the given gap tolerance.
pub fn group_events(records: &[OutageRecord], gap: GapTolerance) -> EventCatalog {
    group_events_with(
        records,
        &EventOptions {
            gap,
            ..EventOptions::default()
        },
    )
}

pub fn group_events_with(records: &[OutageRecord], opts: &EventOptions) -> EventCatalog {
    for code in opts.grouping.unmapped_codes(records) {
        log::warn!("cause code `{code}` has no group; counted as other");
    }

    let mut order: Vec<&OutageRecord> = records.iter().collect();
    order.sort_by(|a, b| (a.start, a.end, &a.outage_id).cmp(&(b.start, b.end, &b.outage_id)));

    let mut chains: Vec<Vec<&OutageRecord>> = Vec::new();
    let mut running_end = None;
    for r in order {
        match running_end {
            Some(end) if opts.gap.admits(r.start, end) => {
                chains.last_mut().expect("open chain").push(r);
                running_end = Some(end.max(r.end));
            }
            _ => {
                chains.push(vec![r]);
                running_end = Some(r.end);
            }
        }
    }

    let events = chains
        .into_iter()
        .enumerate()
        .map(|(i, members)| {
            let start = members.iter().map(|r| r.start).min().expect("nonempty chain");
            let end = members.iter().map(|r| r.end).max().expect("nonempty chain");
            let owned: Vec<OutageRecord> = members.iter().map(|r| (*r).clone()).collect();
            let (cause_group, tie_flag) = majority_cause(&owned, &opts.grouping);
            let mut event = ResilienceEvent {
                event_id: i as u64 + 1,
                outage_ids: owned.into_iter().map(|r| r.outage_id).collect(),
                size: members.len() as u64,
                start,
                end,
                season: Season::NonSummer,
                cause_group,
                tie_flag,
            };
            event.season = tag_season(&event, &opts.summer_months);
            event
        })
        .collect::<Vec<_>>();

    let n_year = opts
        .n_year
        .unwrap_or_else(|| observed_span_years(records.iter().map(|r| (r.start, r.end))));
    EventCatalog {
        events,
        n_year,
        gap_tolerance: Some(opts.gap),
        source_record_count: records.len() as u64,
    }
}
