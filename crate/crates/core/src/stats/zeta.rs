//! Hurwitz zeta and related power/log series.
//!
//! Every infinite series here has the form
//!
//! ```text
//!     Σ_{n≥0} P(ln(a+n)) · (a+n)^{-s},   s > 1
//! ```
//!
//! for a small polynomial `P`. The Hurwitz zeta function is the case `P = 1`;
//! the log-moments of the discrete power law use `P(L) = L` and `P(L) = L²`
//! (or shifted versions such as `(L - b)²`). The head of the series is summed
//! directly up to a switch-over point `X`, and the tail from `X` to infinity
//! is evaluated with the Euler–Maclaurin formula. All derivatives of
//! `x^{-s} P(ln x)` stay of the same shape, so the correction terms are
//! computed exactly by a polynomial recurrence.
//!
//! `X` is chosen at least `s + 20`, which makes the ratio of successive
//! correction terms smaller than `1/6`; the expansion is cut once a term
//! drops below `1e-17` of the accumulated value, and that next-term size is
//! the remainder bound.

use crate::error::{Error, Result};

/// `B_{2j}` for `j = 1..=15`.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const TERM_TOL: f64 = 1e-17;

/// `B_{2j} / (2j)!` for `j = 1..=15`.
fn em_coefficients() -> [f64; 15] {
    let mut out = [0.0; 15];
    let mut fact = 1.0_f64;
    let mut k = 0u32;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let target = 2 * (j as u32 + 1);
        while k < target {
            k += 1;
            fact *= f64::from(k);
        }
        out[j] = b / fact;
    }
    out
}

fn poly_eval(poly: &[f64], l: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, c| acc * l + c)
}

#[inline]
fn term(x: f64, s: f64, poly: &[f64]) -> f64 {
    x.powf(-s) * poly_eval(poly, x.ln())
}

/// `∫_x^∞ t^{-s} P(ln t) dt` for `s > 1`.
fn tail_integral(x: f64, s: f64, poly: &[f64]) -> f64 {
    let sigma = s - 1.0;
    let l = x.ln();
    let mut total = 0.0;
    for (j, &c) in poly.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        // ∫ t^{-s} L^j = x^{-σ} Σ_i j!/(j-i)! L^{j-i} / σ^{i+1}
        let mut falling = 1.0;
        let mut inner = 0.0;
        for i in 0..=j {
            if i > 0 {
                falling *= (j + 1 - i) as f64;
            }
            inner += falling * l.powi((j - i) as i32) / sigma.powi(i as i32 + 1);
        }
        total += c * inner;
    }
    x.powf(-sigma) * total
}

/// Coefficients of `d/dx [x^{-t} P(ln x)] = x^{-(t+1)} Q(ln x)`.
fn differentiate(t: f64, poly: &[f64]) -> Vec<f64> {
    (0..poly.len())
        .map(|i| {
            let next = poly.get(i + 1).copied().unwrap_or(0.0);
            -t * poly[i] + (i + 1) as f64 * next
        })
        .collect()
}

fn switch_over(s: f64) -> f64 {
    (s + 20.0).max(20.0)
}

/// Euler–Maclaurin sum `Σ_{n≥0} f(x+n)` for `f(t) = t^{-s} P(ln t)`.
fn em_infinite_tail(x: f64, s: f64, poly: &[f64]) -> Result<f64> {
    let coeffs = em_coefficients();
    let mut acc = tail_integral(x, s, poly) + 0.5 * term(x, s, poly);

    // First derivative, then step by two each round.
    let mut t = s;
    let mut deriv = differentiate(t, poly);
    t += 1.0;
    for (j, c) in coeffs.iter().enumerate() {
        let corr = c * x.powf(-t) * poly_eval(&deriv, x.ln());
        acc -= corr;
        if j >= 1 && corr.abs() <= TERM_TOL * acc.abs() {
            return Ok(acc);
        }
        deriv = differentiate(t, &deriv);
        t += 1.0;
        deriv = differentiate(t, &deriv);
        t += 1.0;
    }
    Err(Error::NonConvergence(format!(
        "Euler-Maclaurin tail at x={x}, s={s}"
    )))
}

/// `Σ_{n≥0} P(ln(a+n)) (a+n)^{-s}` where `poly[j]` multiplies `ln^j`.
pub fn log_power_series(s: f64, a: f64, poly: &[f64]) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("series needs s > 1, got {s}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("series needs a > 0, got {a}")));
    }
    let x0 = switch_over(s);
    let head_len = if a >= x0 { 0 } else { (x0 - a).ceil() as u64 };

    // Smallest terms first.
    let head: f64 = (0..head_len)
        .rev()
        .map(|n| term(a + n as f64, s, poly))
        .sum();
    let tail = em_infinite_tail(a + head_len as f64, s, poly)?;
    Ok(head + tail)
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (a+n)^{-s}` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    log_power_series(s, a, &[1.0])
}

/// Finite sum `Σ_{n=lo}^{hi} n^{-t}` for any real `t`.
///
/// Summed directly for short ranges; long ranges sum a head directly and
/// close the rest with the two-sided Euler–Maclaurin formula.
pub fn power_sum(t: f64, lo: u64, hi: u64) -> f64 {
    const DIRECT_LIMIT: u64 = 200_000;
    if hi < lo {
        return 0.0;
    }
    if hi - lo < DIRECT_LIMIT {
        return (lo..=hi).rev().map(|n| (n as f64).powf(-t)).sum();
    }
    let x0 = switch_over(t.abs()).max(lo as f64) as u64;
    let head: f64 = (lo..x0).rev().map(|n| (n as f64).powf(-t)).sum();

    let x = x0 as f64;
    let b = hi as f64;
    let integral = if (t - 1.0).abs() < 1e-15 {
        (b / x).ln()
    } else {
        (b.powf(1.0 - t) - x.powf(1.0 - t)) / (1.0 - t)
    };
    let mut acc = integral + 0.5 * (x.powf(-t) + b.powf(-t));

    // f^{(m)}(y) = falling(m) y^{-t-m}, falling(m) = Π_{i<m} (-t-i)
    let coeffs = em_coefficients();
    let mut falling = -t;
    let mut order = 1.0;
    for (j, c) in coeffs.iter().enumerate() {
        let corr = c * falling * (b.powf(-t - order) - x.powf(-t - order));
        acc += corr;
        if j >= 1 && corr.abs() <= TERM_TOL * acc.abs() {
            break;
        }
        falling *= (-t - order) * (-t - order - 1.0);
        order += 2.0;
    }
    head + acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Brute-force reference: partial sum to `m` terms plus the
    /// integral/trapezoid tail `∫_M^∞ + f(M)/2`, whose error is below
    /// `s M^{-s-1} / 12`.
    fn brute_zeta(s: f64, a: f64, m: u64) -> f64 {
        let head: f64 = (0..m).rev().map(|n| (a + n as f64).powf(-s)).sum();
        let x = a + m as f64;
        head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
    }

    #[test]
    fn basel() {
        let z = hurwitz_zeta(2.0, 1.0).unwrap();
        assert!((z - PI * PI / 6.0).abs() < 1e-14, "{z}");
    }

    #[test]
    fn known_closed_forms() {
        // ζ(2, 1/2) = π²/2, ζ(4, 1) = π⁴/90
        assert!((hurwitz_zeta(2.0, 0.5).unwrap() - PI * PI / 2.0).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence() {
        for &(s, a) in &[(2.3, 10.0), (1.5, 0.3), (4.0, 2.5), (51.0, 10.0), (1.05, 7.0)] {
            let lhs = hurwitz_zeta(s, a).unwrap() - a.powf(-s);
            let rhs = hurwitz_zeta(s, a + 1.0).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "s={s} a={a}");
        }
    }

    #[test]
    fn matches_brute_force() {
        let z = hurwitz_zeta(2.3, 10.0).unwrap();
        let brute = brute_zeta(2.3, 10.0, 10_000_000);
        assert!((z - brute).abs() < 1e-10, "{z} vs {brute}");
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(hurwitz_zeta(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(2.0, 0.0), Err(Error::Domain(_))));
        assert!(hurwitz_zeta(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn log_series_matches_brute_force() {
        let s = 2.3;
        let m = 2_000_000u64;
        let head: f64 = (10..10 + m)
            .rev()
            .map(|n| {
                let x = n as f64;
                x.ln().powi(2) * x.powf(-s)
            })
            .sum();
        let x = (10 + m) as f64;
        let l = x.ln();
        let sigma = s - 1.0;
        let tail = x.powf(-sigma) * (l * l / sigma + 2.0 * l / (sigma * sigma) + 2.0 / sigma.powi(3))
            + 0.5 * l * l * x.powf(-s);
        let brute = head + tail;
        let em = log_power_series(s, 10.0, &[0.0, 0.0, 1.0]).unwrap();
        assert!((em - brute).abs() < 1e-10, "{em} vs {brute}");
    }

    #[test]
    fn power_sum_direct_and_em_agree() {
        for &t in &[2.3, 1.3, 1.0, 0.3, -0.7, 3.0] {
            let direct: f64 = (10..=600_000u64).rev().map(|n| (n as f64).powf(-t)).sum();
            let em = power_sum(t, 10, 600_000);
            assert!((em - direct).abs() <= 1e-11 * direct.abs(), "t={t}: {em} vs {direct}");
        }
    }

    #[test]
    fn power_sum_empty_range() {
        assert_eq!(power_sum(2.0, 10, 9), 0.0);
        assert_eq!(power_sum(2.0, 4, 4), 4f64.powf(-2.0));
    }
}
