//! Haptic drop rate against the in-burst inter-arrival time, per TTI.
//! The first zero-drop t_ib marks where a scheme becomes usable.

use haptic_uplink::analysis::drop_walk;
use haptic_uplink::{HapticTrafficModel, RadioConfig, SchedulingScheme, Time};

fn main() {
    for tti_us in [125, 250, 500, 1000] {
        let tti = Time::from_micros(tti_us);
        let radio = RadioConfig {
            tti,
            t_sr: tti,
            t_pg: tti * 10,
            ..RadioConfig::default()
        };
        for scheme in SchedulingScheme::ALL {
            let first_zero = (0..=40)
                .map(|i| Time::from_micros(1000 + 50 * i))
                .find(|&t_ib| {
                    let h = HapticTrafficModel {
                        t_ib,
                        ..Default::default()
                    };
                    (0..=40)
                        .map(|j| Time::from_micros(1000 + 50 * j))
                        .filter(|&t| t >= t_ib)
                        .all(|t| {
                            drop_walk(scheme, &radio, &HapticTrafficModel { t_ib: t, ..h }).dropped
                                == 0
                        })
                });
            let worst = drop_walk(
                scheme,
                &radio,
                &HapticTrafficModel {
                    t_ib: Time::from_millis(1),
                    ..Default::default()
                },
            );
            match first_zero {
                Some(t) => println!(
                    "tti {:>5} ms {:>4}: zero drops from t_ib = {} ms (drop rate at 1 ms: {:.3})",
                    tti.as_millis_f64(),
                    scheme,
                    t.as_millis_f64(),
                    worst.drop_rate
                ),
                None => println!(
                    "tti {:>5} ms {:>4}: drops everywhere in [1, 3] ms (drop rate at 1 ms: {:.3})",
                    tti.as_millis_f64(),
                    scheme,
                    worst.drop_rate
                ),
            }
        }
    }
}
