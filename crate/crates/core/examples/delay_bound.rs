//! Leftover delay bounds per scheme, their ingredients, and the violation
//! probability each bound guarantees.

use haptic_uplink::snc::{delay_bound, violation_probability, ServiceCurve};
use haptic_uplink::{
    HapticTrafficModel, LeftoverTrafficModel, RadioConfig, SchedulingScheme, Time,
};

fn main() -> haptic_uplink::Result<()> {
    let haptic = HapticTrafficModel::default();
    let leftover = LeftoverTrafficModel::default();
    for (label, radio) in [
        ("reference", RadioConfig::default()),
        ("tti 0.125 ms, t_pg 4 tti", {
            let tti = Time::from_nanos(125_000);
            RadioConfig {
                tti,
                t_sr: tti,
                t_pg: tti * 4,
                ..RadioConfig::default()
            }
        }),
    ] {
        println!("{label}");
        for eps in [1e-1, 1e-2, 1e-5] {
            for scheme in SchedulingScheme::ALL {
                let b = delay_bound(scheme, &radio, &haptic, &leftover, eps)?;
                let curve = ServiceCurve::new(scheme, &radio, &haptic)?;
                println!(
                    "  eps {eps:<7e} {scheme:>4}: d0 = {:7.3} ms  theta = {:.4e}  rate = {:.0} b/s  P(viol) <= {:.2e}",
                    b.d0 * 1e3,
                    b.theta,
                    b.long_run_rate,
                    violation_probability(b.theta, &curve, b.d0)
                );
            }
        }
    }
    Ok(())
}
