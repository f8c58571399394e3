//! LENORI, ALENO and friends computed from large events.
//!
//! A large event has at least `N_L` outages. The threshold is meant to be
//! fixed once for a system and kept, so metrics stay comparable over time.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::events::EventCatalog;
use crate::stats::{BoundedMoments, LogMoments, RseReport, TailModel};

pub const DEFAULT_THRESHOLD: u64 = 10;
pub const DEFAULT_N_MAX: u64 = 5000;
pub const DEFAULT_RSE_MAX: f64 = 0.1;

/// An event magnitude. Integers for observed counts; reals for shadow
/// slices used to study proportional changes.
pub trait EventSize: Copy {
    fn magnitude(self) -> f64;
}

impl EventSize for u64 {
    fn magnitude(self) -> f64 {
        self as f64
    }
}

impl EventSize for f64 {
    fn magnitude(self) -> f64 {
        self
    }
}

/// Sizes of the large events of one data slice.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeEventSlice<T = u64> {
    sizes: Vec<T>,
    threshold: u64,
    n_year: f64,
    b: f64,
}

fn check_frame(threshold: u64, n_year: f64) -> Result<()> {
    if threshold < 2 {
        return Err(Error::InvalidArgument(format!("N_L must be at least 2, got {threshold}")));
    }
    if !(n_year > 0.0) || !n_year.is_finite() {
        return Err(Error::InvalidArgument(format!("n_year must be positive, got {n_year}")));
    }
    Ok(())
}

impl<T: EventSize> LargeEventSlice<T> {
    /// Every size must be at least `threshold`.
    pub fn new(sizes: Vec<T>, threshold: u64, n_year: f64) -> Result<Self> {
        check_frame(threshold, n_year)?;
        if let Some(s) = sizes.iter().find(|s| !(s.magnitude() >= threshold as f64)) {
            return Err(Error::InvalidArgument(format!(
                "size {} is below the threshold {threshold}",
                s.magnitude()
            )));
        }
        Ok(Self::unchecked(sizes, threshold, n_year))
    }

    fn unchecked(sizes: Vec<T>, threshold: u64, n_year: f64) -> Self {
        Self {
            sizes,
            threshold,
            n_year,
            b: (threshold as f64 - 0.5).ln(),
        }
    }

    pub fn sizes(&self) -> &[T] {
        &self.sizes
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn n_year(&self) -> f64 {
        self.n_year
    }

    /// `ln(N_L - 0.5)`
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_large(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    fn log_excess_sum(&self) -> f64 {
        let denom = self.threshold as f64 - 0.5;
        self.sizes.iter().map(|s| (s.magnitude() / denom).ln()).sum()
    }

    /// Mean of `ln(N_i / (N_L - 0.5))`.
    pub fn aleno(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::NoLargeEvents);
        }
        Ok(self.log_excess_sum() / self.n_large() as f64)
    }

    /// Annualized sum of `ln(N_i / (N_L - 0.5))`; zero with no large events.
    pub fn lenori(&self) -> f64 {
        self.log_excess_sum() / self.n_year
    }

    /// `n_large / n_year`
    pub fn large_event_frequency(&self) -> f64 {
        self.n_large() as f64 / self.n_year
    }

    /// Tail index estimate `1 / ALENO`, a close approximation of the
    /// discrete power-law maximum likelihood estimate for `N_L ≥ 6`.
    pub fn tail_index_estimate(&self) -> Result<f64> {
        if self.threshold < 6 {
            log::warn!(
                "N_L = {} is below 6; 1/ALENO is a rough tail index estimate there",
                self.threshold
            );
        }
        Ok(1.0 / self.aleno()?)
    }

    /// LENORI with the logarithm removed.
    pub fn lennolog(&self) -> f64 {
        let denom = self.threshold as f64 - 0.5;
        self.sizes.iter().map(|s| s.magnitude() / denom).sum::<f64>() / self.n_year
    }

    /// Real-valued copy with every size multiplied by `factor`, keeping the
    /// same membership and threshold.
    pub fn scaled(&self, factor: f64) -> LargeEventSlice<f64> {
        LargeEventSlice::unchecked(
            self.sizes.iter().map(|s| s.magnitude() * factor).collect(),
            self.threshold,
            self.n_year,
        )
    }

    /// Splits into groups by `key`, each with this slice's `n_year` and
    /// threshold.
    pub fn partition<K: Ord>(&self, key: impl Fn(usize, &T) -> K) -> Vec<(K, LargeEventSlice<T>)> {
        let mut groups: std::collections::BTreeMap<K, Vec<T>> = std::collections::BTreeMap::new();
        for (i, s) in self.sizes.iter().enumerate() {
            groups.entry(key(i, s)).or_default().push(*s);
        }
        groups
            .into_iter()
            .map(|(k, sizes)| (k, Self::unchecked(sizes, self.threshold, self.n_year)))
            .collect()
    }
}

/// Large events of a catalog, in catalog order.
pub fn select_large(catalog: &EventCatalog, threshold: u64) -> Result<LargeEventSlice<u64>> {
    check_frame(threshold, catalog.n_year)?;
    let sizes = catalog.sizes().filter(|&n| n >= threshold).collect();
    Ok(LargeEventSlice::unchecked(sizes, threshold, catalog.n_year))
}

/// Where the RSE formulas take their log moments from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentSource {
    /// Moments of the idealized tail at the fitted α.
    #[default]
    Analytic,
    /// Sample moments of the observed large-event sizes.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub n_max: u64,
    pub rse_max: f64,
    pub moments: MomentSource,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            rse_max: DEFAULT_RSE_MAX,
            moments: MomentSource::Analytic,
        }
    }
}

/// All metrics for one data slice.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub threshold: u64,
    pub n_max: u64,
    pub n_year: f64,
    pub n_large: u64,
    pub f_large: f64,
    pub lenori: f64,
    pub lennolog: f64,
    /// `None` when there are no large events.
    pub aleno: Option<f64>,
    pub alpha_hat: Option<f64>,
    /// Largest observed event size.
    pub n_maxobs: Option<u64>,
    /// Accuracy estimates; `None` when there are no large events.
    pub rse: Option<RseReport>,
}

impl MetricsReport {
    pub fn compute<T: EventSize>(slice: &LargeEventSlice<T>, opts: &ReportOptions) -> Result<Self> {
        let n_large = slice.n_large() as u64;
        let f_large = slice.large_event_frequency();
        let n_maxobs = slice
            .sizes()
            .iter()
            .map(|s| s.magnitude().round() as u64)
            .max();
        let (aleno, alpha_hat, rse) = if slice.is_empty() {
            (None, None, None)
        } else {
            let aleno = slice.aleno()?;
            let alpha = slice.tail_index_estimate()?;
            let model = TailModel::bounded(alpha, slice.threshold(), opts.n_max)?;
            let mags = || slice.sizes().iter().map(|s| s.magnitude());
            let (logs, bounded) = match opts.moments {
                MomentSource::Analytic => (model.unbounded().log_moments()?, model.bounded_moments()?),
                MomentSource::Empirical => (
                    LogMoments::from_sample(mags(), slice.threshold())?,
                    BoundedMoments::from_sample(mags(), model.renormalization()?)?,
                ),
            };
            let rse = RseReport::from_parts(&logs, &bounded, n_large as f64, f_large, opts.rse_max)?;
            (Some(aleno), Some(alpha), Some(rse))
        };
        Ok(Self {
            threshold: slice.threshold(),
            n_max: opts.n_max,
            n_year: slice.n_year(),
            n_large,
            f_large,
            lenori: slice.lenori(),
            lennolog: slice.lennolog(),
            aleno,
            alpha_hat,
            n_maxobs,
            rse,
        })
    }

    pub fn rse_ale(&self) -> Option<f64> {
        self.rse.map(|r| r.rse_ale)
    }

    pub fn rse_len(&self) -> Option<f64> {
        self.rse.map(|r| r.rse_len)
    }

    /// Named rows, in the order and with the names used for reporting.
    pub fn rows(&self) -> Vec<(&'static str, Value)> {
        let real = |v: Option<f64>| v.map_or(Value::Null, Value::from);
        let rse = self.rse;
        vec![
            ("α", real(self.alpha_hat)),
            ("ALENO", real(self.aleno)),
            ("LENORI", Value::from(self.lenori)),
            ("RSE_ALE", real(rse.map(|r| r.rse_ale))),
            ("RSE_LEN", real(rse.map(|r| r.rse_len))),
            ("RSE_Pb", real(rse.map(|r| r.rse_pb))),
            ("n_large", Value::from(self.n_large)),
            ("f_large", Value::from(self.f_large)),
            ("n_year", Value::from(self.n_year)),
            ("n_large^min", real(rse.map(|r| r.n_large_min))),
            ("n_year^min", real(rse.and_then(|r| r.n_year_min))),
            ("n_large^minnolog", real(rse.map(|r| r.n_large_minnolog))),
            ("n_year^minnolog", real(rse.and_then(|r| r.n_year_minnolog))),
            ("N_maxobs", self.n_maxobs.map_or(Value::Null, Value::from)),
            ("N_max", Value::from(self.n_max)),
            ("N_L", Value::from(self.threshold)),
            ("LENnolog", Value::from(self.lennolog)),
            ("RSE_LENnolog", real(rse.map(|r| r.rse_lennolog))),
            ("c", real(rse.map(|r| r.c))),
        ]
    }

    /// Flat JSON object keyed by row name.
    pub fn to_json(&self) -> Value {
        Value::Object(self.rows().into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    /// Inverse of [`MetricsReport::to_json`].
    pub fn from_json(value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("metrics report must be a JSON object".into()))?;
        let real = |k: &str| -> Result<Option<f64>> {
            match map.get(k) {
                None => Err(Error::InvalidArgument(format!("report is missing `{k}`"))),
                Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_f64()
                    .map(Some)
                    .ok_or_else(|| Error::InvalidArgument(format!("`{k}` is not a number"))),
            }
        };
        let int = |k: &str| -> Result<Option<u64>> {
            match map.get(k) {
                None => Err(Error::InvalidArgument(format!("report is missing `{k}`"))),
                Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_u64()
                    .map(Some)
                    .ok_or_else(|| Error::InvalidArgument(format!("`{k}` is not an integer"))),
            }
        };
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| Error::InvalidArgument(format!("`{k}` is null")));
        let rse = match (real("RSE_ALE")?, real("RSE_LEN")?) {
            (Some(rse_ale), Some(rse_len)) => Some(RseReport {
                rse_ale,
                rse_len,
                rse_pb: need(real("RSE_Pb")?, "RSE_Pb")?,
                rse_lennolog: need(real("RSE_LENnolog")?, "RSE_LENnolog")?,
                n_large_min: need(real("n_large^min")?, "n_large^min")?,
                n_year_min: real("n_year^min")?,
                n_large_minnolog: need(real("n_large^minnolog")?, "n_large^minnolog")?,
                n_year_minnolog: real("n_year^minnolog")?,
                c: need(real("c")?, "c")?,
            }),
            _ => None,
        };
        let need_int = |k: &str| -> Result<u64> {
            int(k)?.ok_or_else(|| Error::InvalidArgument(format!("`{k}` is null")))
        };
        Ok(Self {
            threshold: need_int("N_L")?,
            n_max: need_int("N_max")?,
            n_year: need(real("n_year")?, "n_year")?,
            n_large: need_int("n_large")?,
            f_large: need(real("f_large")?, "f_large")?,
            lenori: need(real("LENORI")?, "LENORI")?,
            lennolog: need(real("LENnolog")?, "LENnolog")?,
            aleno: real("ALENO")?,
            alpha_hat: real("α")?,
            n_maxobs: int("N_maxobs")?,
            rse,
        })
    }
}
