//! Parse raw outage rows, keep forced outages, and group them into
//! resilience events with a 30 minute gap tolerance.

use lenori::events::{EventOptions, GapTolerance};
use lenori::{filter_forced, group_events_with, parse_outages, CauseGroup, CauseGrouping, Schema};

const RAW: &str = "\
id,began,restored,cause,forced,momentary
a1,2014-07-03 14:05,2014-07-03 16:40,TR01,true,false
a2,2014-07-03 14:20,2014-07-03 15:10,LT,true,false
a3,2014-07-03 17:00,2014-07-03 17:30,TR01,true,false
a4,2014-07-04 09:00,2014-07-04 09:45,EQ,false,false
a5,2014-12-11 02:15,2014-12-11 08:00,WI,true,false
a6,2014-12-11 03:00,not a time,WI,true,false
";

fn main() -> lenori::Result<()> {
    let mut schema = Schema::default();
    schema.set("outage_id", "id")?;
    schema.set("start", "began")?;
    schema.set("end", "restored")?;
    schema.set("cause_code", "cause")?;

    let parsed = parse_outages(RAW.as_bytes(), &schema)?;
    for reject in &parsed.rejects {
        println!("rejected {reject}");
    }

    let mut grouping = CauseGrouping::new();
    grouping.insert("TR01", CauseGroup::Tree);
    grouping.insert("LT", CauseGroup::Weather);
    grouping.insert("WI", CauseGroup::Weather);

    let opts = EventOptions {
        gap: GapTolerance::Minutes(30),
        grouping,
        n_year: Some(1.0),
        ..EventOptions::default()
    };
    let catalog = group_events_with(&filter_forced(&parsed.records), &opts);
    catalog.write(std::io::stdout())?;
    Ok(())
}
