//! Plot-ready PMF of a synthetic tail with the fitted power law alongside,
//! plus the log-binned regression slope (close to -(α+1)).

use lenori::render::{self, Format};
use lenori::synth::sample_power_law;
use lenori::{pmf_table, EventCatalog, PmfScope, TailModel};

fn main() -> lenori::Result<()> {
    let sizes = sample_power_law(&TailModel::new(1.3, 10)?, 100_000, 3)?;
    let catalog = EventCatalog::from_sizes(&sizes, 1.0)?;
    let table = pmf_table(&catalog, PmfScope::Tail { threshold: 10 })?;

    let csv = render::pmf(&table, Format::Csv)?;
    for line in csv.lines().take(8) {
        println!("{line}");
    }
    println!("... {} rows", table.rows.len());
    println!("log-binned slope {:.3}", table.log_binned_slope(2.0, 10)?);
    Ok(())
}
