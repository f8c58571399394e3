//! Hurwitz zeta values and log-weighted series used by the moment formulas.

use lenori::stats::zeta::{hurwitz_zeta, log_power_series};

fn main() -> lenori::Result<()> {
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    println!("ζ(2, 1)      = {:.15}  (π²/6 = {pi2_6:.15})", hurwitz_zeta(2.0, 1.0)?);
    println!("ζ(2.3, 10)   = {:.15}", hurwitz_zeta(2.3, 10.0)?);
    println!("ζ(1.001, 10) = {:.6}", hurwitz_zeta(1.001, 10.0)?);
    // Σ ln(n) n^{-2.3} over n ≥ 10, i.e. -∂ζ(s, 10)/∂s at s = 2.3.
    println!("Σ ln n·n^-2.3 = {:.15}", log_power_series(2.3, 10.0, &[0.0, 1.0])?);
    Ok(())
}
