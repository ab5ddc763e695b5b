//! One slot-level run per scheme, with the JSON report of the first one.

use haptic_uplink::sim::{run, SimConfig, SimReport};
use haptic_uplink::{SchedulingScheme, Time};

fn main() -> haptic_uplink::Result<()> {
    println!("{}", SimReport::CSV_HEADER);
    for scheme in SchedulingScheme::ALL {
        let report = run(&SimConfig::new(scheme, Time::from_millis(200_000), 7))?;
        println!("{}", report.csv_row());
    }
    let mut short = run(&SimConfig::new(
        SchedulingScheme::FastUplink,
        Time::from_millis(10_000),
        7,
    ))?;
    short.haptic_delays.truncate(3);
    short.leftover_delays.truncate(3);
    short.period_counts.truncate(2);
    println!("{}", short.to_json()?);
    Ok(())
}
