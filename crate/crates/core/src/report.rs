//! Tables built on top of the metrics: empirical PMFs, decompositions by
//! season or cause, and sliding-window tracking.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{EventCatalog, Season};
use crate::ingest::CauseGroup;
use crate::metrics::{select_large, MetricsReport, ReportOptions};
use crate::stats::TailModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmfScope {
    AllEvents,
    /// Events with `N ≥ threshold`.
    Tail { threshold: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmfRow {
    pub n: u64,
    pub count: u64,
    pub probability: f64,
    /// Idealized power law at the fitted α (tail scope only).
    pub idealized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub scope: PmfScope,
    pub rows: Vec<PmfRow>,
    /// Tail model fitted by `1/ALENO` (tail scope only).
    pub fitted: Option<TailModel>,
}

/// Empirical PMF of event sizes. The tail scope adds the idealized power
/// law at the tail index estimated from the same events.
pub fn pmf_table(catalog: &EventCatalog, scope: PmfScope) -> Result<PmfTable> {
    let (sizes, fitted): (Vec<u64>, Option<TailModel>) = match scope {
        PmfScope::AllEvents => (catalog.sizes().collect(), None),
        PmfScope::Tail { threshold } => {
            let slice = select_large(catalog, threshold)?;
            let alpha = slice.tail_index_estimate()?;
            (slice.sizes().to_vec(), Some(TailModel::new(alpha, threshold)?))
        }
    };
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for n in &sizes {
        *counts.entry(*n).or_default() += 1;
    }
    let total = sizes.len() as f64;
    let rows = counts
        .into_iter()
        .map(|(n, count)| {
            Ok(PmfRow {
                n,
                count,
                probability: count as f64 / total,
                idealized: fitted.map(|m| m.pmf(n)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PmfTable { scope, rows, fitted })
}

impl PmfTable {
    pub fn total_count(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    /// Slope of `ln p` against `ln n` over logarithmic bins: bin `k`
    /// covers sizes `[lo·ratio^k, lo·ratio^{k+1})`, its density is the
    /// bin probability per integer, located at the geometric mean of the
    /// bin's first and last integer. Bins with fewer than `min_count`
    /// events are ignored.
    pub fn log_binned_slope(&self, ratio: f64, min_count: u64) -> Result<f64> {
        if !(ratio > 1.0) {
            return Err(Error::InvalidArgument(format!("bin ratio must exceed 1, got {ratio}")));
        }
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return Err(Error::NoLargeEvents);
        };
        let total = self.total_count() as f64;
        let mut points = Vec::new();
        let mut edge = first.n as f64;
        while edge <= last.n as f64 {
            let next = edge * ratio;
            let lo = edge.ceil() as u64;
            let hi = (next.ceil() as u64).saturating_sub(1).max(lo);
            let count: u64 = self
                .rows
                .iter()
                .filter(|r| (lo..=hi).contains(&r.n))
                .map(|r| r.count)
                .sum();
            if count >= min_count {
                let width = (hi - lo + 1) as f64;
                let center = ((lo as f64) * (hi as f64)).sqrt();
                points.push((center.ln(), (count as f64 / total / width).ln()));
            }
            edge = next;
        }
        if points.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "only {} populated bins; need 3 for a slope",
                points.len()
            )));
        }
        Ok(least_squares_slope(&points))
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Plot data for the log transformation of the idealized tail.
///
/// Panel (a): `log10_n` vs `log10_pmf`. Panel (b): `ln_n` vs `log10_pmf`.
/// Panel (c): `ln_n` vs `pmf`. Panel (d): `ln_n` vs `frequency`, the PMF
/// scaled by the annual large-event frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelRow {
    pub n: u64,
    pub ln_n: f64,
    pub log10_n: f64,
    pub pmf: f64,
    pub log10_pmf: f64,
    pub frequency: f64,
}

pub fn log_transform_panels(model: &TailModel, f_large: f64, n_hi: u64) -> Result<Vec<PanelRow>> {
    (model.threshold()..=n_hi)
        .map(|n| {
            let pmf = model.pmf(n)?;
            let x = n as f64;
            Ok(PanelRow {
                n,
                ln_n: x.ln(),
                log10_n: x.log10(),
                pmf,
                log10_pmf: pmf.log10(),
                frequency: f_large * pmf,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Season,
    Cause,
}

/// One report per slice plus the whole catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub partition: Partition,
    pub all: MetricsReport,
    pub slices: Vec<(String, MetricsReport)>,
}

impl Decomposition {
    /// `|Σ slice LENORI - all LENORI|`, relative to the total when nonzero.
    pub fn additivity_residual(&self) -> f64 {
        let sum: f64 = self.slices.iter().map(|(_, r)| r.lenori).sum();
        let diff = (sum - self.all.lenori).abs();
        if self.all.lenori != 0.0 {
            diff / self.all.lenori.abs()
        } else {
            diff
        }
    }

    /// Labels and reports, `all` first.
    pub fn columns(&self) -> Vec<(&str, &MetricsReport)> {
        std::iter::once(("all", &self.all))
            .chain(self.slices.iter().map(|(l, r)| (l.as_str(), r)))
            .collect()
    }
}

/// Metrics for each season or cause group, sharing `n_year` and `N_L`.
pub fn decompose(
    catalog: &EventCatalog,
    partition: Partition,
    threshold: u64,
    opts: &ReportOptions,
) -> Result<Decomposition> {
    let all = MetricsReport::compute(&select_large(catalog, threshold)?, opts)?;
    let slices = match partition {
        Partition::Season => Season::ALL
            .iter()
            .map(|&s| {
                let sub = catalog.subset(|e| e.season == s);
                Ok((s.to_string(), MetricsReport::compute(&select_large(&sub, threshold)?, opts)?))
            })
            .collect::<Result<Vec<_>>>()?,
        Partition::Cause => CauseGroup::ALL
            .iter()
            .map(|&g| {
                let sub = catalog.subset(|e| e.cause_group == g);
                Ok((g.to_string(), MetricsReport::compute(&select_large(&sub, threshold)?, opts)?))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Decomposition { partition, all, slices })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRow {
    pub start_year: i32,
    /// Last calendar year in the window, inclusive.
    pub end_year: i32,
    pub report: MetricsReport,
}

impl TrackingRow {
    pub fn label(&self) -> String {
        format!("{}-{}", self.start_year, self.end_year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingTable {
    pub window_years: u32,
    pub rows: Vec<TrackingRow>,
}

impl TrackingTable {
    /// True when every window's LENORI is within `k` of its own RSE_LEN
    /// (relative) from `reference`.
    pub fn is_stationary(&self, reference: f64, k: f64) -> bool {
        self.rows.iter().all(|row| match row.report.rse_len() {
            Some(rse) => (row.report.lenori - reference).abs() <= k * rse * reference.abs(),
            None => false,
        })
    }
}

fn jan_first(year: i32) -> Result<chrono::NaiveDateTime> {
    NaiveDate::from_ymd_opt(year, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .ok_or_else(|| Error::InvalidArgument(format!("year {year} out of range")))
}

/// Metrics over consecutive windows of `window_years` calendar years,
/// stepping one year from January 1 of the first event's year. Events are
/// assigned by start time and each window uses `n_year = window_years`.
pub fn sliding_window(
    catalog: &EventCatalog,
    window_years: u32,
    threshold: u64,
    opts: &ReportOptions,
) -> Result<TrackingTable> {
    if window_years == 0 {
        return Err(Error::InvalidArgument("window must be at least one year".into()));
    }
    let Some((first, last)) = catalog.year_range() else {
        return Err(Error::WindowTooLong {
            window: window_years,
            span: 0,
        });
    };
    let span = (last - first + 1) as u32;
    if window_years > span {
        return Err(Error::WindowTooLong {
            window: window_years,
            span,
        });
    }
    let window = window_years as i32;
    let rows = (first..=last - window + 1)
        .map(|start_year| {
            let lo = jan_first(start_year)?;
            let hi = jan_first(start_year + window)?;
            let sub = catalog
                .subset(|e| e.start >= lo && e.start < hi)
                .with_n_year(f64::from(window_years))?;
            debug_assert!(sub.events.iter().all(|e| e.start.year() >= start_year));
            Ok(TrackingRow {
                start_year,
                end_year: start_year + window - 1,
                report: MetricsReport::compute(&select_large(&sub, threshold)?, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackingTable { window_years, rows })
}
