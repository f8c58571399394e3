//! The discrete power-law description of large-event sizes and the
//! variance formulas built on it.

use serde::{Deserialize, Serialize};

use super::zeta::{hurwitz_zeta, log_power_series, power_sum};
use crate::error::{Error, Result};

/// Idealized large-event tail: `P(N = n) ∝ n^{-(α+1)}` for `n ≥ N_L`,
/// optionally truncated at `N_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTailModel")]
pub struct TailModel {
    alpha: f64,
    threshold: u64,
    n_max: Option<u64>,
}

#[derive(Deserialize)]
struct RawTailModel {
    alpha: f64,
    threshold: u64,
    #[serde(default)]
    n_max: Option<u64>,
}

impl TryFrom<RawTailModel> for TailModel {
    type Error = Error;

    fn try_from(raw: RawTailModel) -> Result<Self> {
        match raw.n_max {
            Some(n_max) => TailModel::bounded(raw.alpha, raw.threshold, n_max),
            None => TailModel::new(raw.alpha, raw.threshold),
        }
    }
}

impl TailModel {
    /// Unbounded model.
    pub fn new(alpha: f64, threshold: u64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidModel(format!("alpha must be positive, got {alpha}")));
        }
        if threshold < 2 {
            return Err(Error::InvalidModel(format!(
                "threshold N_L must be at least 2, got {threshold}"
            )));
        }
        Ok(Self {
            alpha,
            threshold,
            n_max: None,
        })
    }

    /// Model truncated at `n_max`. `n_max == threshold` is the degenerate
    /// single-point distribution.
    pub fn bounded(alpha: f64, threshold: u64, n_max: u64) -> Result<Self> {
        let mut model = Self::new(alpha, threshold)?;
        if n_max < threshold {
            return Err(Error::InvalidModel(format!(
                "N_max ({n_max}) must be at least N_L ({threshold})"
            )));
        }
        model.n_max = Some(n_max);
        Ok(model)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn n_max(&self) -> Option<u64> {
        self.n_max
    }

    /// Same tail, without the truncation.
    pub fn unbounded(&self) -> Self {
        Self {
            n_max: None,
            ..*self
        }
    }

    /// Same tail truncated at `n_max`.
    pub fn with_n_max(&self, n_max: u64) -> Result<Self> {
        Self::bounded(self.alpha, self.threshold, n_max)
    }

    /// `b = ln(N_L - 0.5)`.
    pub fn b(&self) -> f64 {
        (self.threshold as f64 - 0.5).ln()
    }

    /// PMF exponent `α + 1`.
    pub fn exponent(&self) -> f64 {
        self.alpha + 1.0
    }

    /// `ζ(α+1, N_L)`.
    pub fn zeta_norm(&self) -> Result<f64> {
        hurwitz_zeta(self.exponent(), self.threshold as f64)
    }

    /// Renormalization constant `c = 1 - ζ(α+1, N_max+1)/ζ(α+1, N_L)`;
    /// 1 for the unbounded model.
    pub fn renormalization(&self) -> Result<f64> {
        match self.n_max {
            None => Ok(1.0),
            Some(n_max) => {
                let s = self.exponent();
                Ok(1.0 - hurwitz_zeta(s, n_max as f64 + 1.0)? / self.zeta_norm()?)
            }
        }
    }

    /// Probability of exactly `n` outages.
    pub fn pmf(&self, n: u64) -> Result<f64> {
        if n < self.threshold {
            return Err(Error::Domain(format!(
                "pmf support starts at N_L = {}, got n = {n}",
                self.threshold
            )));
        }
        if matches!(self.n_max, Some(m) if n > m) {
            return Ok(0.0);
        }
        let norm = self.zeta_norm()? * self.renormalization()?;
        Ok((n as f64).powf(-self.exponent()) / norm)
    }

    /// `E[X^k]` with `X = ln P`, `k ∈ {1, 2}`, for the unbounded tail.
    pub fn log_moment(&self, k: u32) -> Result<f64> {
        let poly: &[f64] = match k {
            1 => &[0.0, 1.0],
            2 => &[0.0, 0.0, 1.0],
            _ => return Err(Error::Domain(format!("log moment order must be 1 or 2, got {k}"))),
        };
        self.log_expectation(poly)
    }

    /// `E[P(ln N)]` under the unbounded model.
    fn log_expectation(&self, poly: &[f64]) -> Result<f64> {
        let s = self.exponent();
        let a = self.threshold as f64;
        Ok(log_power_series(s, a, poly)? / hurwitz_zeta(s, a)?)
    }

    /// First and second moments of `X - b` plus the variance of `X`,
    /// evaluated without cancellation.
    pub fn log_moments(&self) -> Result<LogMoments> {
        let b = self.b();
        let mean_x = self.log_moment(1)?;
        let centered_b = self.log_expectation(&[b * b, -2.0 * b, 1.0])?;
        let variance = self.log_expectation(&[mean_x * mean_x, -2.0 * mean_x, 1.0])?;
        Ok(LogMoments {
            mean_x,
            excess_mean: mean_x - b,
            excess_second: centered_b,
            variance,
        })
    }

    /// `E[P^k]` of the unbounded tail; divergent when `α ≤ k`.
    pub fn raw_moment(&self, k: u32) -> Result<Moment> {
        if self.alpha <= f64::from(k) {
            return Ok(Moment::Divergent);
        }
        let s = self.exponent();
        let a = self.threshold as f64;
        Ok(Moment::Finite(
            hurwitz_zeta(s - f64::from(k), a)? / hurwitz_zeta(s, a)?,
        ))
    }

    /// Moments of the truncated distribution `Pb`.
    pub fn bounded_moments(&self) -> Result<BoundedMoments> {
        let n_max = self
            .n_max
            .ok_or_else(|| Error::InvalidModel("bounded moments need N_max".into()))?;
        let s = self.exponent();
        let lo = self.threshold;
        let c = self.renormalization()?;
        let norm = c * self.zeta_norm()?;
        let mean = power_sum(s - 1.0, lo, n_max) / norm;
        let second = power_sum(s - 2.0, lo, n_max) / norm;
        let var = (second - mean * mean).max(0.0);
        // Single-point support has zero spread; guard the rounding.
        let rse = if n_max == lo { 0.0 } else { var.sqrt() / mean };
        Ok(BoundedMoments {
            mean,
            second,
            c,
            rse,
        })
    }
}

/// Log-transformed moments used by every RSE formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    /// `E[X]`
    pub mean_x: f64,
    /// `E[X] - b`, the model ALENO.
    pub excess_mean: f64,
    /// `E[(X - b)^2]`
    pub excess_second: f64,
    /// `Var X`
    pub variance: f64,
}

impl LogMoments {
    /// Moments of a sample of sizes, for the empirical path.
    pub fn from_sample(sizes: impl IntoIterator<Item = f64>, threshold: u64) -> Result<Self> {
        let logs: Vec<f64> = sizes.into_iter().map(f64::ln).collect();
        if logs.is_empty() {
            return Err(Error::NoLargeEvents);
        }
        let n = logs.len() as f64;
        let b = (threshold as f64 - 0.5).ln();
        let mean_x = logs.iter().sum::<f64>() / n;
        let excess_second = logs.iter().map(|x| (x - b).powi(2)).sum::<f64>() / n;
        let variance = logs.iter().map(|x| (x - mean_x).powi(2)).sum::<f64>() / n;
        Ok(Self {
            mean_x,
            excess_mean: mean_x - b,
            excess_second,
            variance,
        })
    }

    /// LENORI relative standard error for `n_large` expected events.
    pub fn rse_lenori(&self, n_large: f64) -> f64 {
        self.excess_second.sqrt() / (self.excess_mean * n_large.sqrt())
    }

    /// ALENO relative standard error for `n_large` expected events.
    pub fn rse_aleno(&self, n_large: f64) -> f64 {
        self.variance.sqrt() / (self.excess_mean * n_large.sqrt())
    }

    /// Large events needed for LENORI to reach `rse_max`.
    pub fn min_large_events(&self, rse_max: f64) -> f64 {
        self.excess_second / (self.excess_mean.powi(2) * rse_max * rse_max)
    }
}

/// Outcome of a raw moment: finite or divergent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn value(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedMoments {
    /// `E[Pb]`
    pub mean: f64,
    /// `E[Pb²]`
    pub second: f64,
    /// renormalization constant
    pub c: f64,
    /// `RSE_Pb`
    pub rse: f64,
}

impl BoundedMoments {
    /// Sample moments of the sizes; `c` is carried through from the model.
    pub fn from_sample(sizes: impl IntoIterator<Item = f64>, c: f64) -> Result<Self> {
        let sizes: Vec<f64> = sizes.into_iter().collect();
        if sizes.is_empty() {
            return Err(Error::NoLargeEvents);
        }
        let n = sizes.len() as f64;
        let mean = sizes.iter().sum::<f64>() / n;
        let second = sizes.iter().map(|x| x * x).sum::<f64>() / n;
        let var = sizes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Ok(Self {
            mean,
            second,
            c,
            rse: var.sqrt() / mean,
        })
    }

    /// RSE of LENnolog: `sqrt(1 + RSE_Pb²) / sqrt(n_large)`.
    pub fn rse_lennolog(&self, n_large: f64) -> f64 {
        (1.0 + self.rse * self.rse).sqrt() / n_large.sqrt()
    }

    /// Large events needed for LENnolog to reach `rse_max`.
    pub fn min_large_events_nolog(&self, rse_max: f64) -> f64 {
        (1.0 + self.rse * self.rse) / (rse_max * rse_max)
    }
}

fn check_count(n_large: f64) -> Result<()> {
    if !(n_large > 0.0) {
        return Err(Error::Domain(format!("n_large must be positive, got {n_large}")));
    }
    Ok(())
}

fn check_rse(rse_max: f64) -> Result<()> {
    if !(rse_max > 0.0) {
        return Err(Error::Domain(format!("rse_max must be positive, got {rse_max}")));
    }
    Ok(())
}

/// `RSE_LEN = sqrt(E[(X-b)²]) / ((E X - b) sqrt(n_large))`.
pub fn rse_lenori(model: &TailModel, n_large: f64) -> Result<f64> {
    check_count(n_large)?;
    Ok(model.log_moments()?.rse_lenori(n_large))
}

/// `RSE_ALE = σ(X) / ((E X - b) sqrt(n_large))`.
pub fn rse_aleno(model: &TailModel, n_large: f64) -> Result<f64> {
    check_count(n_large)?;
    Ok(model.log_moments()?.rse_aleno(n_large))
}

/// `n_large^min = E[(X-b)²] / ((E X - b)² rse_max²)`.
pub fn min_large_events(model: &TailModel, rse_max: f64) -> Result<f64> {
    check_rse(rse_max)?;
    Ok(model.log_moments()?.min_large_events(rse_max))
}

/// `n_year^min = n_large^min / f_large`.
pub fn min_years(n_large_min: f64, f_large_all: f64) -> Result<f64> {
    if f_large_all <= 0.0 {
        return Err(Error::InsufficientFrequency);
    }
    Ok(n_large_min / f_large_all)
}

/// RSE of LENnolog under the bounded model.
pub fn rse_lennolog(model: &TailModel, n_large: f64) -> Result<f64> {
    check_count(n_large)?;
    Ok(model.bounded_moments()?.rse_lennolog(n_large))
}

/// Large events needed for LENnolog to reach `rse_max`.
pub fn min_large_events_nolog(model: &TailModel, rse_max: f64) -> Result<f64> {
    check_rse(rse_max)?;
    Ok(model.bounded_moments()?.min_large_events_nolog(rse_max))
}

/// The analytic accuracy quantities for one model and event count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RseReport {
    pub rse_ale: f64,
    pub rse_len: f64,
    pub rse_pb: f64,
    pub rse_lennolog: f64,
    pub n_large_min: f64,
    pub n_year_min: Option<f64>,
    pub n_large_minnolog: f64,
    pub n_year_minnolog: Option<f64>,
    pub c: f64,
}

impl RseReport {
    /// Analytic report for a bounded model, `n_large` events and large-event
    /// frequency `f_large` (years undefined when it is zero).
    pub fn analytic(model: &TailModel, n_large: f64, f_large: f64, rse_max: f64) -> Result<Self> {
        let logs = model.unbounded().log_moments()?;
        Self::from_parts(&logs, &model.bounded_moments()?, n_large, f_large, rse_max)
    }

    /// Assembles the report from log moments and bounded-size moments,
    /// which may come from the model or from a sample.
    pub fn from_parts(
        logs: &LogMoments,
        bounded: &BoundedMoments,
        n_large: f64,
        f_large: f64,
        rse_max: f64,
    ) -> Result<Self> {
        check_count(n_large)?;
        check_rse(rse_max)?;
        let n_large_min = logs.min_large_events(rse_max);
        let n_large_minnolog = bounded.min_large_events_nolog(rse_max);
        Ok(Self {
            rse_ale: logs.rse_aleno(n_large),
            rse_len: logs.rse_lenori(n_large),
            rse_pb: bounded.rse,
            rse_lennolog: bounded.rse_lennolog(n_large),
            n_large_min,
            n_year_min: min_years(n_large_min, f_large).ok(),
            n_large_minnolog,
            n_year_minnolog: min_years(n_large_minnolog, f_large).ok(),
            c: bounded.c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_model() -> TailModel {
        TailModel::bounded(1.3, 10, 5000).unwrap()
    }

    /// Direct partial sum to 10^7 plus integral and trapezoid tail terms.
    fn brute_norm(s: f64, lo: u64) -> f64 {
        let m = 10_000_000u64;
        let head: f64 = (lo..lo + m).rev().map(|n| (n as f64).powf(-s)).sum();
        let x = (lo + m) as f64;
        head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
    }

    #[test]
    fn constructor_validation() {
        assert!(TailModel::new(0.0, 10).is_err());
        assert!(TailModel::new(-1.0, 10).is_err());
        assert!(TailModel::new(1.3, 1).is_err());
        assert!(TailModel::bounded(1.3, 10, 9).is_err());
        assert!(TailModel::bounded(1.3, 10, 10).is_ok());
        assert_eq!(TailModel::new(1.3, 10).unwrap().b(), 9.5f64.ln());
    }

    #[test]
    fn pmf_normalizes_unbounded() {
        let model = TailModel::new(1.3, 10).unwrap();
        let m = 1_000_000u64;
        let partial: f64 = (10..10 + m).rev().map(|n| model.pmf(n).unwrap()).sum();
        // Tail mass is bracketed by the integral test.
        let s = model.exponent();
        let z = model.zeta_norm().unwrap();
        let x = (10 + m) as f64;
        let upper = (x - 1.0).powf(1.0 - s) / (s - 1.0) / z;
        let lower = x.powf(1.0 - s) / (s - 1.0) / z;
        assert!(partial + lower - 1e-10 <= 1.0 && 1.0 <= partial + upper + 1e-10);
        assert!((partial + 0.5 * (lower + upper) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pmf_normalizes_bounded() {
        let model = table_model();
        let total: f64 = (10..=5000u64).rev().map(|n| model.pmf(n).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
        assert_eq!(model.pmf(5001).unwrap(), 0.0);
    }

    #[test]
    fn pmf_ratio_and_domain() {
        let model = TailModel::new(1.3, 10).unwrap();
        let ratio = model.pmf(10).unwrap() / model.pmf(20).unwrap();
        assert!((ratio - 2f64.powf(2.3)).abs() < 1e-12);
        assert!(model.pmf(9).is_err());
    }

    #[test]
    fn pmf_at_threshold_matches_brute_normalization() {
        let model = TailModel::new(1.3, 10).unwrap();
        let expected = 10f64.powf(-2.3) / brute_norm(2.3, 10);
        assert!((model.pmf(10).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn second_log_moment_matches_brute_force() {
        let model = TailModel::new(1.3, 10).unwrap();
        let s = 2.3;
        let m = 5_000_000u64;
        let head: f64 = (10..10 + m)
            .rev()
            .map(|n| {
                let x = n as f64;
                x.ln().powi(2) * x.powf(-s)
            })
            .sum();
        let x = (10 + m) as f64;
        let l = x.ln();
        let sg = s - 1.0;
        let tail = x.powf(-sg) * (l * l / sg + 2.0 * l / (sg * sg) + 2.0 / sg.powi(3)) + 0.5 * l * l * x.powf(-s);
        let brute = (head + tail) / brute_norm(s, 10);
        assert!((model.log_moment(2).unwrap() - brute).abs() < 1e-10);
    }

    #[test]
    fn log_moment_excess_is_near_inverse_alpha() {
        let model = TailModel::new(1.3, 10).unwrap();
        let aleno = model.log_moment(1).unwrap() - model.b();
        // Discrete correction keeps it within a few tenths of a percent.
        assert!((aleno - 0.769).abs() < 0.003, "{aleno}");
        assert!(model.log_moment(3).is_err());
    }

    #[test]
    fn log_moment_steep_limit() {
        let model = TailModel::new(50.0, 10).unwrap();
        assert!((model.log_moment(1).unwrap() - 10f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn raw_moment_divergence_grid() {
        for &alpha in &[0.5, 1.0, 1.3, 2.0, 2.5, 3.0] {
            for k in 1..=2u32 {
                let m = TailModel::new(alpha, 10).unwrap().raw_moment(k).unwrap();
                assert_eq!(m.is_divergent(), alpha <= f64::from(k), "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn raw_moment_matches_brute_force() {
        let model = TailModel::new(3.0, 10).unwrap();
        let mean = model.raw_moment(1).unwrap().value().unwrap();
        let brute = brute_norm(3.0, 10) / brute_norm(4.0, 10);
        assert!((mean - brute).abs() < 1e-9 * brute);
    }

    #[test]
    fn bounded_converges_to_unbounded() {
        let raw = TailModel::new(3.0, 10).unwrap().raw_moment(1).unwrap().value().unwrap();
        let bounded = TailModel::bounded(3.0, 10, 100_000_000).unwrap().bounded_moments().unwrap();
        assert!(((bounded.mean - raw) / raw).abs() < 1e-4);
    }

    #[test]
    fn renormalization_agrees_with_finite_sum() {
        let model = table_model();
        let c = model.renormalization().unwrap();
        let direct = power_sum(2.3, 10, 5000) / model.zeta_norm().unwrap();
        assert!((c - direct).abs() < 1e-13);
    }

    #[test]
    fn renormalization_monotone_in_n_max() {
        let mut prev = 0.0;
        for n_max in [10u64, 11, 20, 100, 1000, 5000, 100_000, 10_000_000] {
            let c = TailModel::bounded(1.3, 10, n_max).unwrap().renormalization().unwrap();
            assert!(c > prev && c <= 1.0, "n_max={n_max} c={c}");
            prev = c;
        }
    }

    #[test]
    fn degenerate_bounded_model() {
        let m = TailModel::bounded(1.3, 10, 10).unwrap().bounded_moments().unwrap();
        assert!((m.mean - 10.0).abs() < 1e-12);
        assert_eq!(m.rse, 0.0);
        assert!((m.min_large_events_nolog(0.1) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn rse_scaling() {
        let model = TailModel::new(1.3, 10).unwrap();
        let a = rse_lenori(&model, 558.0).unwrap();
        let b = rse_lenori(&model, 4.0 * 558.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        let a = rse_aleno(&model, 100.0).unwrap();
        let b = rse_aleno(&model, 400.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        let bounded = table_model();
        let a = rse_lennolog(&bounded, 100.0).unwrap();
        let b = rse_lennolog(&bounded, 400.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!(rse_lenori(&model, 0.0).is_err());
    }

    #[test]
    fn aleno_rse_below_lenori_rse() {
        for &alpha in &[0.503, 1.0, 1.3, 2.51] {
            let model = TailModel::new(alpha, 10).unwrap();
            assert!(rse_aleno(&model, 558.0).unwrap() < rse_lenori(&model, 558.0).unwrap());
        }
    }

    #[test]
    fn min_events_inverse_square() {
        let model = TailModel::new(1.3, 10).unwrap();
        let a = min_large_events(&model, 0.1).unwrap();
        let b = min_large_events(&model, 0.05).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
        assert!(min_large_events(&model, 0.0).is_err());
    }

    #[test]
    fn min_years_cases() {
        assert!((min_years(199.0, 93.0).unwrap() - 2.1398).abs() < 1e-4);
        assert!((min_years(1090.0, 93.0).unwrap() - 11.72).abs() < 1e-2);
        assert_eq!(min_years(100.0, 20.0).unwrap(), 2.0 * min_years(100.0, 40.0).unwrap());
        assert!(matches!(min_years(1.0, 0.0), Err(Error::InsufficientFrequency)));
    }

    #[test]
    fn empirical_moments_constant_sample() {
        let logs = LogMoments::from_sample([10.0; 5], 10).unwrap();
        assert!((logs.excess_mean - (10.0f64 / 9.5).ln()).abs() < 1e-15);
        assert!(logs.variance.abs() < 1e-20);
        assert!(LogMoments::from_sample(Vec::<f64>::new(), 10).is_err());
    }
}
