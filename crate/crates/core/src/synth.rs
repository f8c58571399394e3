//! Synthetic event catalogs and Monte Carlo checks of the RSE formulas.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). A run seeded with `seed`
//! gives trial `i` its own generator: ChaCha8 keyed by `seed` on stream `i`.
//! Results therefore do not depend on how trials are scheduled.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{tag_season, EventCatalog, ResilienceEvent, Season, SummerMonths, JULIAN_YEAR_MINUTES};
use crate::ingest::CauseGroup;
use crate::stats::{zeta::hurwitz_zeta, TailModel};

/// Support points tabulated for the unbounded sampler.
pub const DEFAULT_TABLE_LEN: u64 = 1_000_000;

/// Generator for stream `stream` of a seeded run.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inverse-CDF sampler for the discrete power law.
///
/// Sizes `N_L ..= N_L + len - 1` (or up to `N_max`) are drawn exactly from
/// a cumulative table. For the unbounded law the remaining mass beyond the
/// table is drawn from a continuous Pareto with the same tail index,
/// starting half a unit below the first untabulated size, and rounded.
#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    threshold: u64,
    alpha: f64,
    cumulative: Vec<f64>,
    /// Unnormalized mass beyond the table; zero when bounded.
    tail_weight: f64,
}

impl PowerLawSampler {
    pub fn new(model: &TailModel) -> Result<Self> {
        Self::with_table_len(model, DEFAULT_TABLE_LEN)
    }

    pub fn with_table_len(model: &TailModel, table_len: u64) -> Result<Self> {
        if table_len == 0 {
            return Err(Error::InvalidArgument("sampler table needs at least one entry".into()));
        }
        let lo = model.threshold();
        let s = model.exponent();
        let hi = match model.n_max() {
            Some(n_max) if n_max - lo >= table_len => {
                return Err(Error::InvalidArgument(format!(
                    "N_max = {n_max} needs more than the {table_len} table entries allowed"
                )))
            }
            Some(n_max) => n_max,
            None => lo + table_len - 1,
        };
        let mut cumulative = Vec::with_capacity((hi - lo + 1) as usize);
        let mut acc = 0.0;
        for n in lo..=hi {
            acc += (n as f64).powf(-s);
            cumulative.push(acc);
        }
        let tail_weight = match model.n_max() {
            Some(_) => 0.0,
            None => hurwitz_zeta(s, hi as f64 + 1.0)?,
        };
        Ok(Self {
            threshold: lo,
            alpha: model.alpha(),
            cumulative,
            tail_weight,
        })
    }

    /// Probability of landing beyond the table.
    pub fn tail_mass(&self) -> f64 {
        let table = *self.cumulative.last().expect("nonempty table");
        self.tail_weight / (table + self.tail_weight)
    }

    /// Largest tabulated size.
    pub fn table_end(&self) -> u64 {
        self.threshold + self.cumulative.len() as u64 - 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let table = *self.cumulative.last().expect("nonempty table");
        let u = rng.random::<f64>() * (table + self.tail_weight);
        if u < table {
            let idx = self.cumulative.partition_point(|&c| c <= u);
            return self.threshold + idx.min(self.cumulative.len() - 1) as u64;
        }
        let first = self.table_end() + 1;
        let x_min = first as f64 - 0.5;
        let v: f64 = rng.random();
        let x = x_min * (1.0 - v).powf(-1.0 / self.alpha);
        (x.round() as u64).max(first)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<u64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// `count` i.i.d. sizes from `model`, seeded.
pub fn sample_power_law(model: &TailModel, count: usize, seed: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let sampler = PowerLawSampler::new(model)?;
    let mut rng = trial_rng(seed, 0);
    Ok(sampler.sample_n(&mut rng, count))
}

/// One Poisson draw with the given mean.
pub fn sample_event_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    let poisson = Poisson::new(mean).map_err(|e| Error::InvalidArgument(format!("Poisson mean {mean}: {e}")))?;
    Ok(poisson.sample(rng) as u64)
}

fn default_start_year() -> i32 {
    2011
}

/// Parameters of a synthetic large-event catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub model: TailModel,
    /// Mean number of large events per year.
    pub mean_events_per_year: f64,
    pub years: f64,
    pub seed: u64,
    /// Relative event rate per calendar month, January first.
    #[serde(default)]
    pub seasonal_weights: Option<[f64; 12]>,
    /// Probabilities of tree, weather and other.
    #[serde(default)]
    pub cause_mix: Option<[f64; 3]>,
    /// Catalog begins on January 1 of this year.
    #[serde(default = "default_start_year")]
    pub start_year: i32,
}

impl SyntheticSpec {
    pub fn new(model: TailModel, mean_events_per_year: f64, years: f64, seed: u64) -> Self {
        Self {
            model,
            mean_events_per_year,
            years,
            seed,
            seasonal_weights: None,
            cause_mix: None,
            start_year: default_start_year(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_events_per_year > 0.0) || !self.mean_events_per_year.is_finite() {
            return Err(Error::InvalidSpec("mean_events_per_year must be positive".into()));
        }
        if !(self.years > 0.0) || !self.years.is_finite() {
            return Err(Error::InvalidSpec("years must be positive".into()));
        }
        if let Some(w) = &self.seasonal_weights {
            if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || w.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidSpec(
                    "seasonal weights must be finite, nonnegative and not all zero".into(),
                ));
            }
        }
        if let Some(mix) = &self.cause_mix {
            if mix.iter().any(|p| !(*p >= 0.0)) || (mix.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidSpec("cause_mix must be probabilities summing to 1".into()));
            }
        }
        Ok(())
    }

    /// Expected number of large events over the whole span.
    pub fn expected_events(&self) -> f64 {
        self.mean_events_per_year * self.years
    }
}

fn draw_cause<R: Rng + ?Sized>(mix: &[f64; 3], rng: &mut R) -> CauseGroup {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (p, g) in mix.iter().zip(CauseGroup::ALL) {
        acc += p;
        if u < acc {
            return g;
        }
    }
    // Rounding left u above the last partial sum.
    CauseGroup::ALL
        .into_iter()
        .zip(mix)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map_or(CauseGroup::Other, |(g, _)| g)
}

/// A catalog with a Poisson number of events, power-law sizes, times drawn
/// over the span (weighted by month when requested) and causes drawn from
/// the mix (all `other` without one). Deterministic in the spec's seed.
pub fn synth_catalog(spec: &SyntheticSpec) -> Result<EventCatalog> {
    spec.validate()?;
    let sampler = PowerLawSampler::new(&spec.model)?;
    let mut rng = trial_rng(spec.seed, 0);
    let count = sample_event_count(spec.expected_events(), &mut rng)?;
    let origin: NaiveDateTime = NaiveDate::from_ymd_opt(spec.start_year, 1, 1)
        .ok_or_else(|| Error::InvalidSpec(format!("bad start year {}", spec.start_year)))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight");
    let span_minutes = (spec.years * JULIAN_YEAR_MINUTES).floor() as i64;
    let max_weight = spec
        .seasonal_weights
        .map(|w| w.iter().copied().fold(0.0, f64::max));
    let summer = SummerMonths::default();

    let mut events = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let start = loop {
            let t = origin + Duration::minutes(rng.random_range(0..span_minutes.max(1)));
            match (spec.seasonal_weights, max_weight) {
                (Some(w), Some(top)) => {
                    let accept = w[t.month0() as usize] / top;
                    if rng.random::<f64>() < accept {
                        break t;
                    }
                }
                _ => break t,
            }
        };
        let size = sampler.sample(&mut rng);
        let cause_group = match &spec.cause_mix {
            Some(mix) => draw_cause(mix, &mut rng),
            None => CauseGroup::Other,
        };
        let mut event = ResilienceEvent {
            event_id: 0,
            outage_ids: Vec::new(),
            size,
            start,
            end: start + Duration::minutes(size.min(7 * 24 * 60) as i64),
            season: Season::NonSummer,
            cause_group,
            tie_flag: false,
        };
        event.season = tag_season(&event, &summer);
        events.push(event);
    }
    EventCatalog::from_events(events, spec.years)
}

/// Sample RSE of one metric across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RseEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub rse: f64,
    /// Jackknife standard error of `rse` itself.
    pub jackknife_se: f64,
    pub samples: usize,
}

impl RseEstimate {
    /// Sample std (n - 1 denominator) over sample mean, with a
    /// leave-one-out jackknife error bar.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 values, got {n}")));
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let std_dev = (ss / (nf - 1.0)).sqrt();
        let rse = std_dev / mean;

        let loo: Vec<f64> = values
            .iter()
            .map(|&v| {
                let d = v - mean;
                let m = mean - d / (nf - 1.0);
                let ss_i = (ss - d * d * nf / (nf - 1.0)).max(0.0);
                (ss_i / (nf - 2.0)).sqrt() / m
            })
            .collect();
        let loo_mean = loo.iter().sum::<f64>() / nf;
        let jackknife_se = ((nf - 1.0) / nf * loo.iter().map(|t| (t - loo_mean).powi(2)).sum::<f64>()).sqrt();
        Ok(Self {
            mean,
            std_dev,
            rse,
            jackknife_se,
            samples: n,
        })
    }
}

/// Empirical RSEs of LENORI, ALENO and LENnolog across synthetic catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloRse {
    pub trials: usize,
    pub lenori: RseEstimate,
    /// Over trials with at least one large event.
    pub aleno: RseEstimate,
    pub lennolog: RseEstimate,
    /// Trials that drew no large events.
    pub empty_trials: usize,
}

pub const MIN_TRIALS: usize = 1000;

/// Runs `trials` independent catalogs (Poisson count, power-law sizes) and
/// measures each metric's spread. Trials run in parallel.
pub fn monte_carlo_rse(spec: &SyntheticSpec, trials: usize) -> Result<MonteCarloRse> {
    spec.validate()?;
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let sampler = PowerLawSampler::new(&spec.model)?;
    let threshold = spec.model.threshold();
    let denom = threshold as f64 - 0.5;
    let mean_count = spec.expected_events();
    let years = spec.years;

    let outcomes: Vec<(f64, Option<f64>, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<(f64, Option<f64>, f64)> {
            let mut rng = trial_rng(spec.seed, trial);
            let count = sample_event_count(mean_count, &mut rng)?;
            let mut log_sum = 0.0;
            let mut raw_sum = 0.0;
            for _ in 0..count {
                let ratio = sampler.sample(&mut rng) as f64 / denom;
                log_sum += ratio.ln();
                raw_sum += ratio;
            }
            let aleno = (count > 0).then(|| log_sum / count as f64);
            Ok((log_sum / years, aleno, raw_sum / years))
        })
        .collect::<Result<_>>()?;

    let lenori: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let aleno: Vec<f64> = outcomes.iter().filter_map(|o| o.1).collect();
    let lennolog: Vec<f64> = outcomes.iter().map(|o| o.2).collect();
    Ok(MonteCarloRse {
        trials,
        lenori: RseEstimate::from_values(&lenori)?,
        aleno: RseEstimate::from_values(&aleno)?,
        lennolog: RseEstimate::from_values(&lennolog)?,
        empty_trials: trials - aleno.len(),
    })
}

/// One comparison of an empirical quantity with its analytic value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    /// Allowed relative deviation.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn relative(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        let passed = ((observed - expected) / expected).abs() <= tolerance;
        Self {
            name: name.into(),
            expected,
            observed,
            tolerance,
            passed,
        }
    }

    pub fn relative_error(&self) -> f64 {
        (self.observed - self.expected) / self.expected
    }
}

/// Monte Carlo validation of the RSE formulas at the given spec: LENORI
/// and ALENO against the unbounded tail (5%), LENnolog against the bounded
/// tail (10%).
pub fn validate_rse_formulas(spec: &SyntheticSpec, trials: usize) -> Result<Vec<Check>> {
    let n_large = spec.expected_events();
    let unbounded = SyntheticSpec {
        model: spec.model.unbounded(),
        ..spec.clone()
    };
    let logs = spec.model.unbounded().log_moments()?;
    let mc = monte_carlo_rse(&unbounded, trials)?;
    let mut checks = vec![
        Check::relative("RSE_LEN", logs.rse_lenori(n_large), mc.lenori.rse, 0.05),
        Check::relative("RSE_ALE", logs.rse_aleno(n_large), mc.aleno.rse, 0.05),
    ];
    if spec.model.n_max().is_some() {
        let bounded = spec.model.bounded_moments()?;
        let mc_b = monte_carlo_rse(spec, trials)?;
        checks.push(Check::relative(
            "RSE_LENnolog",
            bounded.rse_lennolog(n_large),
            mc_b.lennolog.rse,
            0.10,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> TailModel {
        TailModel::new(1.3, 10).unwrap()
    }

    #[test]
    fn zero_draws() {
        assert!(sample_power_law(&model(), 0, 1).unwrap().is_empty());
    }

    #[test]
    fn bounded_support_respected() {
        let m = TailModel::bounded(1.3, 10, 50).unwrap();
        let draws = sample_power_law(&m, 200_000, 7).unwrap();
        assert!(draws.iter().all(|&n| (10..=50).contains(&n)));
        assert!(draws.contains(&50));
    }

    #[test]
    fn degenerate_bounded_model_is_constant() {
        let m = TailModel::bounded(1.3, 10, 10).unwrap();
        assert!(sample_power_law(&m, 1000, 3).unwrap().iter().all(|&n| n == 10));
    }

    #[test]
    fn threshold_frequency_within_binomial_band() {
        let m = model();
        let draws = sample_power_law(&m, 1_000_000, 11).unwrap();
        let p = m.pmf(10).unwrap();
        let hits = draws.iter().filter(|&&n| n == 10).count() as f64;
        let sd = (1e6 * p * (1.0 - p)).sqrt();
        assert!((hits - 1e6 * p).abs() < 3.0 * sd, "hits {hits} expected {}", 1e6 * p);
    }

    #[test]
    fn tail_continuation_is_used() {
        let m = model();
        let s = PowerLawSampler::with_table_len(&m, 100).unwrap();
        let expected = (hurwitz_zeta(2.3, 110.0).unwrap()) / hurwitz_zeta(2.3, 10.0).unwrap();
        assert!((s.tail_mass() - expected).abs() < 1e-12);
        let mut rng = trial_rng(5, 0);
        let draws = s.sample_n(&mut rng, 200_000);
        let beyond = draws.iter().filter(|&&n| n >= 110).count() as f64 / 2e5;
        let sd = (expected * (1.0 - expected) / 2e5).sqrt();
        assert!((beyond - expected).abs() < 4.0 * sd);
        // Tail draws follow the exceedance law P(N ≥ 2x | N ≥ x) ≈ 2^{-α}.
        let far = draws.iter().filter(|&&n| n >= 220).count() as f64 / 2e5;
        assert!((far / beyond - 2f64.powf(-1.3)).abs() < 0.05);
    }

    #[test]
    fn poisson_concentration() {
        let mut rng = trial_rng(99, 0);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| sample_event_count(558.0, &mut rng).unwrap() as f64)
            .collect();
        let mean = draws.iter().sum::<f64>() / 1e5;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (1e5 - 1.0);
        assert!((547.0..=569.0).contains(&mean));
        assert!((mean / 558.0 - 1.0).abs() < 0.02);
        assert!((var / 558.0 - 1.0).abs() < 0.02);

        let zeros = (0..1000)
            .filter(|_| sample_event_count(1e-4, &mut rng).unwrap() == 0)
            .count();
        assert!(zeros >= 995);
        assert!(sample_event_count(0.0, &mut rng).is_err());
    }

    #[test]
    fn catalog_is_deterministic() {
        let spec = SyntheticSpec::new(model(), 93.0, 6.0, 42);
        let a = synth_catalog(&spec).unwrap();
        let b = synth_catalog(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.sizes().all(|n| n >= 10));
        assert_eq!(a.n_year, 6.0);
        assert_eq!(a.year_range().map(|r| r.0), Some(2011));
        let other = synth_catalog(&SyntheticSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn cause_mix_concentration() {
        let mut spec = SyntheticSpec::new(model(), 2000.0, 6.0, 8);
        spec.cause_mix = Some([0.5, 0.05, 0.45]);
        let cat = synth_catalog(&spec).unwrap();
        let n = cat.len() as f64;
        for (g, p) in CauseGroup::ALL.into_iter().zip([0.5, 0.05, 0.45]) {
            let k = cat.events.iter().filter(|e| e.cause_group == g).count() as f64;
            let sd = (n * p * (1.0 - p)).sqrt();
            assert!((k - n * p).abs() < 3.0 * sd, "{g}: {k} vs {}", n * p);
        }
    }

    #[test]
    fn seasonal_weights_shift_mass() {
        let mut spec = SyntheticSpec::new(model(), 500.0, 4.0, 2);
        let mut w = [0.0; 12];
        w[6] = 1.0;
        spec.seasonal_weights = Some(w);
        let cat = synth_catalog(&spec).unwrap();
        assert!(cat.events.iter().all(|e| e.start.month() == 7 && e.season == Season::Summer));
    }

    #[test]
    fn spec_validation() {
        let mut spec = SyntheticSpec::new(model(), 93.0, 6.0, 1);
        spec.cause_mix = Some([0.5, 0.5, 0.5]);
        assert!(spec.validate().is_err());
        let spec = SyntheticSpec::new(model(), 0.0, 6.0, 1);
        assert!(synth_catalog(&spec).is_err());
        let mut spec = SyntheticSpec::new(model(), 1.0, 6.0, 1);
        spec.seasonal_weights = Some([0.0; 12]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_json() {
        let text = r#"{"model":{"alpha":1.3,"threshold":10,"n_max":5000},
            "mean_events_per_year":93,"years":6,"seed":7}"#;
        let spec: SyntheticSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.model.n_max(), Some(5000));
        assert_eq!(spec.start_year, 2011);
        let bad = r#"{"model":{"alpha":-1,"threshold":10},"mean_events_per_year":93,"years":6,"seed":7}"#;
        assert!(serde_json::from_str::<SyntheticSpec>(bad).is_err());
    }

    #[test]
    fn jackknife_on_known_values() {
        let est = RseEstimate::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((est.mean - 2.5).abs() < 1e-15);
        assert!((est.std_dev - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // Brute-force leave-one-out.
        let vals = [1.0, 2.0, 3.0, 4.0];
        let loo: Vec<f64> = (0..4)
            .map(|i| {
                let rest: Vec<f64> = vals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                let m = rest.iter().sum::<f64>() / 3.0;
                let sd = (rest.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 2.0).sqrt();
                sd / m
            })
            .collect();
        let lm = loo.iter().sum::<f64>() / 4.0;
        let se = (0.75 * loo.iter().map(|t| (t - lm).powi(2)).sum::<f64>()).sqrt();
        assert!((est.jackknife_se - se).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_degenerate_case() {
        let spec = SyntheticSpec::new(TailModel::bounded(1.3, 10, 10).unwrap(), 50.0, 2.0, 5);
        let a = monte_carlo_rse(&spec, 1000).unwrap();
        let b = monte_carlo_rse(&spec, 1000).unwrap();
        assert_eq!(a, b);
        assert!(a.aleno.rse.abs() < 1e-12);
        assert!(monte_carlo_rse(&spec, 999).is_err());
    }
}
