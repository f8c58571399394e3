#![allow(dead_code)]

use lenori::events::ResilienceEvent;
use lenori::{CauseGroup, EventCatalog, Season};

/// `E[(ln(N/(N_L - 0.5)))^k]` for k = 0, 1, 2 under the unbounded power
/// law, by direct summation to `terms` plus the integral of the tail and
/// the trapezoid half-term. Entry 0 is the unnormalized mass.
pub fn brute_log_moments(alpha: f64, threshold: u64, terms: u64) -> [f64; 3] {
    let s = alpha + 1.0;
    let denom = threshold as f64 - 0.5;
    let cut = threshold + terms;
    let mut sums = [0.0f64; 3];
    for n in threshold..cut {
        let x = n as f64;
        let w = x.powf(-s);
        let l = (x / denom).ln();
        sums[0] += w;
        sums[1] += w * l;
        sums[2] += w * l * l;
    }
    let m = cut as f64;
    let big_l = (m / denom).ln();
    let head = m.powf(1.0 - s);
    let a = s - 1.0;
    let f_m = m.powf(-s);
    sums[0] += head / a + f_m / 2.0;
    sums[1] += head * (big_l / a + 1.0 / (a * a)) + f_m * big_l / 2.0;
    sums[2] += head * (big_l * big_l / a + 2.0 * big_l / (a * a) + 2.0 / (a * a * a))
        + f_m * big_l * big_l / 2.0;
    [sums[0], sums[1] / sums[0], sums[2] / sums[0]]
}

/// Mean and second moment of the power law truncated at `n_max`, and the
/// share of the unbounded mass it keeps, by direct summation.
pub fn brute_bounded(alpha: f64, threshold: u64, n_max: u64, unbounded_mass: f64) -> (f64, f64, f64) {
    let s = alpha + 1.0;
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for n in threshold..=n_max {
        let x = n as f64;
        let w = x.powf(-s);
        z += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    (m1 / z, m2 / z, z / unbounded_mass)
}

pub fn event(size: u64, start: &str, season: Season, cause: CauseGroup) -> ResilienceEvent {
    let t = lenori::ingest::parse_timestamp(start).expect("fixture timestamp");
    ResilienceEvent {
        event_id: 0,
        outage_ids: Vec::new(),
        size,
        start: t,
        end: t,
        season,
        cause_group: cause,
        tie_flag: false,
    }
}

/// Relative difference, absolute when `b` is zero.
pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub fn catalog_of(sizes: &[u64], n_year: f64) -> EventCatalog {
    EventCatalog::from_sizes(sizes, n_year).expect("valid sizes")
}
