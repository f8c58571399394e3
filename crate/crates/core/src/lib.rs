//! Large-event resilience metrics for distribution-system outage data.
//!
//! Outage records are grouped into resilience events whose size is the
//! number of outages they contain. Events of size at least `N_L` form a
//! power-law tail, summarized by LENORI (tail log-size per year) and
//! ALENO (mean tail log-size, the reciprocal of the tail index). The
//! crate also gives analytic relative standard errors for both metrics
//! and a Monte Carlo harness that checks them.
//!
//! ```
//! use lenori::{LargeEventSlice, MetricsReport, ReportOptions};
//!
//! let slice = LargeEventSlice::new(vec![10u64, 20, 40], 10, 1.0)?;
//! let report = MetricsReport::compute(&slice, &ReportOptions::default())?;
//! assert_eq!(report.n_large, 3);
//! assert!((report.lenori - 3.0 * report.aleno.unwrap()).abs() < 1e-12);
//! # Ok::<(), lenori::Error>(())
//! ```

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod events;
pub mod ingest;
pub mod metrics;
pub mod render;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use events::{
    group_events, group_events_with, EventCatalog, EventOptions, GapTolerance, ResilienceEvent, Season,
    SummerMonths,
};
pub use ingest::{filter_forced, parse_outages, CauseGroup, CauseGrouping, OutageRecord, Schema};
pub use metrics::{select_large, LargeEventSlice, MetricsReport, MomentSource, ReportOptions};
pub use report::{decompose, pmf_table, sliding_window, Decomposition, Partition, PmfScope, PmfTable, TrackingTable};
pub use stats::TailModel;
pub use synth::{monte_carlo_rse, synth_catalog, validate_rse_formulas, SyntheticSpec};
