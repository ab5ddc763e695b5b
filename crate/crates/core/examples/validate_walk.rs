//! Cross-checks the simulator's haptic scheduler against the analytic walk.

use haptic_uplink::sim::{validate_against_walk, SimConfig};
use haptic_uplink::{HapticTrafficModel, SchedulingScheme, Time};

fn main() -> haptic_uplink::Result<()> {
    env_logger::init();
    for scheme in SchedulingScheme::ALL {
        for tti_us in [125, 250, 500, 1000] {
            let tti = Time::from_micros(tti_us);
            let verdicts: Vec<bool> = [1000, 1500, 2000, 2500]
                .into_iter()
                .map(|t_ib_us| {
                    let mut c = SimConfig::new(scheme, Time::from_millis(12_000), 0);
                    c.radio.tti = tti;
                    c.radio.t_sr = tti;
                    c.radio.t_pg = tti * 10;
                    c.haptic = HapticTrafficModel {
                        t_ib: Time::from_micros(t_ib_us),
                        ..Default::default()
                    };
                    validate_against_walk(&c)
                })
                .collect::<Result<_, _>>()?;
            println!(
                "{scheme:>4} tti {:>5} ms: {verdicts:?}",
                tti.as_millis_f64()
            );
        }
    }
    Ok(())
}
