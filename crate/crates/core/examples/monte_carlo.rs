//! Monte Carlo check of the analytic RSE formulas. Pass the trial count as
//! the first argument (default 2000).

use lenori::synth::SyntheticSpec;
use lenori::{validate_rse_formulas, TailModel};

fn main() -> lenori::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000);
    let spec = SyntheticSpec::new(TailModel::bounded(1.3, 10, 5000)?, 93.0, 6.0, 42);
    for check in validate_rse_formulas(&spec, trials)? {
        println!(
            "{:<13} analytic {:.5}  empirical {:.5}  ({:+.2}%, tolerance {:.0}%) {}",
            check.name,
            check.expected,
            check.observed,
            100.0 * check.relative_error(),
            100.0 * check.tolerance,
            if check.passed { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
