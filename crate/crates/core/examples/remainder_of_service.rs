//! Capacity per traffic period left for background traffic.

use haptic_uplink::analysis::{consumed_per_period, remainder_of_service};
use haptic_uplink::{HapticTrafficModel, RadioConfig, SchedulingScheme, Time};

fn main() -> haptic_uplink::Result<()> {
    let radio = RadioConfig::default();
    println!(
        "{:>6} {:>8} {:>10} {:>14}",
        "scheme", "t_ib_ms", "haptic_tx", "remainder_bits"
    );
    for scheme in SchedulingScheme::ALL {
        for t_ib_ms in [1, 2, 3] {
            let h = HapticTrafficModel {
                t_ib: Time::from_millis(t_ib_ms),
                ..Default::default()
            };
            println!(
                "{:>6} {:>8} {:>10} {:>14.0}",
                scheme,
                t_ib_ms,
                consumed_per_period(scheme, &radio, &h),
                remainder_of_service(scheme, &radio, &h)?
            );
        }
    }
    Ok(())
}
