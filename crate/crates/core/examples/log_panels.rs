//! Data for the four views of the idealized tail: log-log, semi-log,
//! linear PMF against ln n, and annual frequency against ln n.

use lenori::render::{self, Format};
use lenori::report::log_transform_panels;
use lenori::TailModel;

fn main() -> lenori::Result<()> {
    let model = TailModel::new(1.3, 10)?;
    let rows = log_transform_panels(&model, 93.0, 40)?;
    print!("{}", render::panels(&rows, Format::Table)?);
    Ok(())
}
