use haptic_uplink::analysis::{drop_walk, ds_effective_burst_count, remainder_of_service};
use haptic_uplink::radio::{ds_grant_latency, haptic_access_delay, m_blocks};
use haptic_uplink::snc::{
    effective_bandwidth, horizontal_distance, max_theta, ArrivalCurve, ServiceCurve,
};
use haptic_uplink::traffic::{counters, haptic_arrivals};
use haptic_uplink::{
    HapticTrafficModel, LeftoverTrafficModel, RadioConfig, SchedulingScheme, Time,
};
use proptest::prelude::*;
use SchedulingScheme::*;

fn tti_strategy() -> impl Strategy<Value = Time> {
    prop_oneof![
        Just(125_000i64),
        Just(250_000),
        Just(500_000),
        Just(1_000_000)
    ]
    .prop_map(Time::from_nanos)
}

fn scheme_strategy() -> impl Strategy<Value = SchedulingScheme> {
    prop_oneof![
        Just(DynamicScheduling),
        Just(SemiPersistent),
        Just(SoftResourceReservation),
        Just(FastUplink)
    ]
}

fn radio_for(tti: Time, pg_ttis: i64) -> RadioConfig {
    RadioConfig {
        tti,
        t_sr: tti,
        t_pg: tti * pg_ttis,
        ..RadioConfig::default()
    }
}

fn haptic_us(t_ib_us: i64) -> HapticTrafficModel {
    HapticTrafficModel {
        t_ib: Time::from_micros(t_ib_us),
        ..HapticTrafficModel::default()
    }
}

proptest! {
    #[test]
    fn blocks_bracket_the_demand(tti_us in 10i64..2000, n in 1u32..64, demand_us in 1i64..200) {
        let r = RadioConfig {
            n_channels: n,
            tti: Time::from_micros(tti_us),
            t_sr: Time::from_micros(tti_us),
            t_pg: Time::from_micros(tti_us * 10),
            haptic_demand_norm: Time::from_micros(demand_us),
            ..RadioConfig::default()
        };
        let need = i64::from(n) * demand_us;
        match m_blocks(&r) {
            Ok(m) => {
                let m = i64::from(m);
                prop_assert!(m * tti_us >= need && (m - 1) * tti_us < need);
                // a longer TTI never needs more blocks
                let longer = RadioConfig { tti: Time::from_micros(tti_us + 1), ..r };
                prop_assert!(i64::from(m_blocks(&longer).unwrap()) <= m);
            }
            Err(e) => prop_assert!(e.is_config() && need > i64::from(n) * tti_us),
        }
    }

    #[test]
    fn access_delays_are_ordered(tti in tti_strategy(), sr_ttis in 1i64..8, pg_ttis in 1i64..40) {
        let r = RadioConfig { tti, t_sr: tti * sr_ttis, t_pg: tti * pg_ttis, ..RadioConfig::default() };
        let fa = haptic_access_delay(FastUplink, &r, true);
        let ds = haptic_access_delay(DynamicScheduling, &r, true);
        let sps = haptic_access_delay(SemiPersistent, &r, true);
        prop_assert!(fa < ds);
        prop_assert!(fa < sps);
        prop_assert_eq!(sps, r.t_pg + tti * 4);
        prop_assert_eq!(haptic_access_delay(SoftResourceReservation, &r, true), sps);
        prop_assert_eq!(haptic_access_delay(SoftResourceReservation, &r, false), ds);
    }

    #[test]
    fn counters_are_monotone(t_ib_us in 100i64..10_000, d1 in 0i64..10_000, d2 in 0i64..10_000) {
        let h = haptic_us(t_ib_us);
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        prop_assert!(counters(&h, Time::from_millis(lo)).n_p <= counters(&h, Time::from_millis(hi)).n_p);
        let denser = haptic_us(t_ib_us / 2 + 1);
        prop_assert!(counters(&denser, Time::ZERO).r_b >= counters(&h, Time::ZERO).r_b);
    }

    #[test]
    fn timeline_counts_match_counters(t_ib_us in 200i64..20_000, periods in 1i64..5) {
        let h = HapticTrafficModel { worst_case_excess_burst: false, ..haptic_us(t_ib_us) };
        let c = counters(&h, Time::ZERO);
        let n = haptic_arrivals(&h, h.t_p * periods).len() as i64;
        prop_assert!(periods * c.r_p <= n && n <= periods * (c.r_p + 2));
        prop_assert_eq!(drop_walk(DynamicScheduling, &radio_for(Time::from_micros(500), 10), &h).arrivals as i64, c.r_p);
    }

    #[test]
    fn walk_accounting(scheme in scheme_strategy(), tti in tti_strategy(), t_ib_us in 200i64..6000) {
        let r = drop_walk(scheme, &radio_for(tti, 10), &haptic_us(t_ib_us));
        prop_assert_eq!(r.arrivals, r.transmitted + r.dropped);
        prop_assert_eq!(r.per_packet_delays.len() as u64, r.transmitted);
        prop_assert!((0.0..=1.0).contains(&r.drop_rate));
    }

    #[test]
    fn ds_drops_iff_faster_than_grant_latency(tti in tti_strategy(), t_ib_us in 200i64..6000) {
        let radio = radio_for(tti, 10);
        let h = haptic_us(t_ib_us);
        let zero = drop_walk(DynamicScheduling, &radio, &h).dropped == 0;
        prop_assert_eq!(zero, h.t_ib >= ds_grant_latency(&radio));
        if h.t_ib >= tti {
            prop_assert_eq!(drop_walk(FastUplink, &radio, &h).dropped, 0);
        }
    }

    #[test]
    fn closed_form_within_one_of_walk(tti in tti_strategy(), t_ib_us in 200i64..6000) {
        let radio = radio_for(tti, 10);
        let h = haptic_us(t_ib_us);
        let walk = drop_walk(DynamicScheduling, &radio, &h).burst_transmitted as i64;
        let closed = ds_effective_burst_count(&radio, &h);
        prop_assert!((walk - closed).abs() <= 1);
        let k = ds_grant_latency(&radio).div_ceil(h.t_ib).max(1);
        if h.t_b.is_multiple_of(h.t_ib * k) {
            prop_assert_eq!(walk, closed);
        }
    }

    #[test]
    fn reserved_remainders(tti in tti_strategy(), pg_ttis in 1i64..40, t_ib_us in 200i64..6000) {
        let radio = radio_for(tti, pg_ttis);
        let h = haptic_us(t_ib_us);
        let sps = remainder_of_service(SemiPersistent, &radio, &h).unwrap();
        let srr = remainder_of_service(SoftResourceReservation, &radio, &h).unwrap();
        if h.t_nb >= radio.t_pg {
            prop_assert!(srr >= sps);
        }
        for s in [SemiPersistent, SoftResourceReservation] {
            let other = remainder_of_service(s, &radio, &haptic_us(1000)).unwrap();
            prop_assert_eq!(remainder_of_service(s, &radio, &h).unwrap(), other);
        }
    }

    #[test]
    fn service_never_exceeds_capacity(scheme in scheme_strategy(), tti in tti_strategy(), u in 0.0f64..10.0) {
        let c = ServiceCurve::new(scheme, &radio_for(tti, 10), &HapticTrafficModel::default()).unwrap();
        prop_assert!(c.eval(u) <= c.capacity() * u);
    }

    #[test]
    fn inverse_is_the_last_crossing(scheme in scheme_strategy(), tti in tti_strategy(), x in 0.0f64..3e6) {
        let c = ServiceCurve::new(scheme, &radio_for(tti, 10), &HapticTrafficModel::default()).unwrap();
        let s = c.invert(x);
        prop_assert!(s.is_finite() && s >= 0.0);
        let tp = c.period();
        let tol = 1e-6 * x.max(1.0);
        // dense check after s, with every period boundary included
        for i in 0..=4000 {
            let u = s + 3.0 * tp * f64::from(i) / 4000.0;
            prop_assert!(c.eval(u) >= x - tol, "beta({u}) = {} < {x}", c.eval(u));
        }
        let mut k = (s / tp).ceil();
        while k * tp <= s + 3.0 * tp {
            prop_assert!(c.eval(k * tp) >= x - tol);
            k += 1.0;
        }
        if s > 0.0 {
            prop_assert!(c.eval(s - 1e-7) < x + tol);
        }
    }

    #[test]
    fn theta_sits_on_the_stability_edge(lambda in 0.1f64..50.0, sigma in 100.0f64..20_000.0, slack in 1.01f64..20.0) {
        let leftover = LeftoverTrafficModel { lambda_rate: lambda, sigma, ..LeftoverTrafficModel::default() };
        let rate = lambda * sigma * slack;
        let theta = max_theta(&leftover, rate).unwrap();
        let eb = effective_bandwidth(lambda, sigma, theta);
        prop_assert!(eb < rate);
        prop_assert!((eb / rate - 1.0).abs() < 1e-6);
        prop_assert!(max_theta(&leftover, lambda * sigma).is_err());
    }
}

/// Brute-force sup-inf on a uniform grid of spacing `step`.
fn brute_horizontal(
    arrival: &ArrivalCurve,
    x: f64,
    curve: &ServiceCurve,
    horizon: f64,
    step: f64,
) -> f64 {
    let tail = horizon + 4.0 * curve.period() + (x / curve.long_run_slope());
    let us: Vec<f64> = (0..)
        .map(|i| i as f64 * step)
        .take_while(|&u| u <= tail)
        .collect();
    let betas: Vec<f64> = us.iter().map(|&u| curve.eval(u)).collect();
    // suffix minima: beta stays above a level from index i on iff suffix_min[i] >= level
    let mut suffix_min = betas;
    for i in (0..suffix_min.len() - 1).rev() {
        suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
    }
    let mut best = 0.0f64;
    for &tau in us.iter().take_while(|&&t| t <= horizon) {
        let level = arrival.eval(tau) + x;
        let first = suffix_min.partition_point(|&m| m < level);
        let d = (us[first.min(us.len() - 1)] - tau).max(0.0);
        best = best.max(d);
    }
    best
}

#[test]
fn horizontal_distance_matches_brute_force() {
    let tti = Time::from_millis(1);
    let radio = RadioConfig {
        n_channels: 1,
        total_rate: 1e5,
        tti,
        t_sr: tti,
        t_pg: tti * 4,
        haptic_demand_norm: Time::from_micros(500),
    };
    assert_eq!(m_blocks(&radio).unwrap(), 1);
    let haptic = HapticTrafficModel {
        t_p: Time::from_millis(40),
        t_b: Time::from_millis(10),
        t_ib: Time::from_millis(2),
        t_nb: Time::from_millis(10),
        worst_case_excess_burst: true,
    };
    let leftover = LeftoverTrafficModel {
        lambda_rate: 2.0,
        sigma: 4000.0,
        ..LeftoverTrafficModel::default()
    };
    for scheme in SchedulingScheme::ALL {
        let curve = ServiceCurve::new(scheme, &radio, &haptic).unwrap();
        let theta = 0.5 * max_theta(&leftover, curve.long_run_slope()).unwrap();
        let arrival = ArrivalCurve::new(&leftover, theta);
        for x in [0.0, 500.0, 3000.0] {
            let horizon = 0.4;
            let got = horizontal_distance(&arrival, x, &curve, horizon).unwrap();
            let step = tti.as_secs_f64() / 40.0;
            let want = brute_horizontal(&arrival, x, &curve, horizon, step);
            assert!(
                (got - want).abs() <= 2.0 * step,
                "{scheme} x={x}: implementation {got}, brute force {want}"
            );
        }
    }
}
