//! Estimate the tail index from power-law draws and bracket it with the
//! analytic standard error of ALENO.

use lenori::synth::sample_power_law;
use lenori::{LargeEventSlice, TailModel};

fn main() -> lenori::Result<()> {
    let truth = TailModel::new(1.3, 10)?;
    for draws in [1_000usize, 10_000, 100_000] {
        let sizes = sample_power_law(&truth, draws, 2024)?;
        let slice = LargeEventSlice::new(sizes, 10, 1.0)?;
        let alpha = slice.tail_index_estimate()?;
        let rse = TailModel::new(alpha, 10)?.log_moments()?.rse_aleno(draws as f64);
        println!(
            "{draws:>7} draws: α̂ = {alpha:.4}, 2σ interval [{:.4}, {:.4}]",
            alpha * (1.0 - 2.0 * rse),
            alpha * (1.0 + 2.0 * rse)
        );
    }
    Ok(())
}
