//! Worst-case haptic access delay of each scheme across the reference TTIs.

use haptic_uplink::radio::haptic_access_delay;
use haptic_uplink::{RadioConfig, SchedulingScheme, Time};

fn main() {
    println!(
        "{:>8} {:>6} {:>10} {:>10}",
        "tti_ms", "scheme", "delay_ms", "ttis"
    );
    for tti_us in [125, 250, 500, 1000] {
        let tti = Time::from_micros(tti_us);
        let radio = RadioConfig {
            tti,
            t_sr: tti,
            t_pg: tti * 10,
            ..RadioConfig::default()
        };
        for scheme in SchedulingScheme::ALL {
            let d = haptic_access_delay(scheme, &radio, true);
            println!(
                "{:>8} {:>6} {:>10.3} {:>10}",
                tti.as_millis_f64(),
                scheme,
                d.as_millis_f64(),
                d.div_floor(tti)
            );
        }
    }
}
