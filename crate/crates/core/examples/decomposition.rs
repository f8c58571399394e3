//! Split LENORI by season and by cause on a synthetic catalog. Slice
//! LENORI values add up to the whole-catalog value.

use lenori::render::{self, Format};
use lenori::synth::SyntheticSpec;
use lenori::{decompose, synth_catalog, Partition, ReportOptions, TailModel};

fn main() -> lenori::Result<()> {
    let mut spec = SyntheticSpec::new(TailModel::bounded(1.3, 10, 5000)?, 93.0, 6.0, 11);
    spec.seasonal_weights = Some([1.0, 1.0, 1.0, 1.0, 1.5, 2.5, 3.0, 3.0, 2.0, 1.0, 1.0, 1.0]);
    spec.cause_mix = Some([0.45, 0.35, 0.20]);
    let catalog = synth_catalog(&spec)?.with_n_year(6.0)?;

    for partition in [Partition::Season, Partition::Cause] {
        let d = decompose(&catalog, partition, 10, &ReportOptions::default())?;
        print!("{}", render::decomposition(&d, Format::Table)?);
        println!();
    }
    Ok(())
}
