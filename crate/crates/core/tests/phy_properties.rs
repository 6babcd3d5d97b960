mod common;

use proptest::prelude::*;
use rand::Rng;

use hmsched::phy::{
    concavity_condition, grid_power_oracle, optimal_power_split, pair_weight,
    pair_weight_derivative, rate_base, rate_incremental, rate_uniform, stationarity_residual,
    stationary_point, Layer, PairMode,
};
use hmsched::{PhyParams, PowerSplit};

fn uncapped() -> PhyParams {
    PhyParams::default().uncapped()
}

fn gain() -> impl Strategy<Value = f64> {
    (-6.0f64..=-1.0).prop_map(|e| 10f64.powf(e))
}

fn ordered_gains() -> impl Strategy<Value = (f64, f64)> {
    (gain(), gain()).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn queue() -> impl Strategy<Value = f64> {
    0.0f64..=1e6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn stationary_point_zeroes_first_derivative(q_n in queue(), q_m in queue(), (h_n, h_m) in ordered_gains()) {
        let p = uncapped();
        if let Some(x) = stationary_point(q_n, q_m, h_n, h_m, &p) {
            if x > 0.0 && x < p.total_power_w {
                let b = q_m * h_m / (h_m * x + p.noise_power_w);
                let r = stationarity_residual(q_n, q_m, h_n, h_m, x, &p);
                prop_assert!(r.abs() <= 1e-9 * b, "residual {r} vs {b}");
            }
        }
    }

    #[test]
    fn closed_form_never_below_grid(q_n in queue(), q_m in queue(), (h_n, h_m) in ordered_gains()) {
        let p = uncapped();
        let closed = optimal_power_split(q_n, q_m, h_n, h_m, &p).unwrap();
        let grid = grid_power_oracle(q_n, q_m, h_n, h_m, &p, 1000).unwrap();
        prop_assert!(grid.weight <= closed.weight * (1.0 + 1e-12) + 1e-9);
    }

    #[test]
    fn result_modes_are_consistent(q_n in queue(), q_m in queue(), (h_n, h_m) in ordered_gains()) {
        let p = uncapped();
        let r = optimal_power_split(q_n, q_m, h_n, h_m, &p).unwrap();
        prop_assert_eq!(r.split.base_power_w + r.split.incremental_power_w, p.total_power_w);
        match r.mode {
            PairMode::Hierarchical => {
                prop_assert!(r.split.interior);
                prop_assert!(r.fallback_user.is_none());
                prop_assert!(concavity_condition(q_n, q_m, h_n, h_m, r.split.incremental_power_w, &p).unwrap());
            }
            PairMode::UniformFallback => {
                prop_assert!(!r.split.interior);
                match r.fallback_user {
                    Some(Layer::Base) => {
                        prop_assert_eq!(r.rate_incremental, 0.0);
                        prop_assert_eq!(r.rate_base, rate_uniform(h_n, &p).unwrap());
                    }
                    Some(Layer::Incremental) => {
                        prop_assert_eq!(r.rate_base, 0.0);
                        prop_assert_eq!(r.rate_incremental, rate_uniform(h_m, &p).unwrap());
                    }
                    None => prop_assert!(false, "fallback without a user"),
                }
            }
        }
    }

    #[test]
    fn boundary_weights_are_uniform_weights(q_n in queue(), q_m in queue(), (h_n, h_m) in ordered_gains()) {
        let p = uncapped();
        let f0 = pair_weight(q_n, q_m, h_n, h_m, 0.0, &p).unwrap();
        let fp = pair_weight(q_n, q_m, h_n, h_m, p.total_power_w, &p).unwrap();
        prop_assert_eq!(f0, q_n * rate_uniform(h_n, &p).unwrap());
        prop_assert_eq!(fp, q_m * rate_uniform(h_m, &p).unwrap());
    }

    #[test]
    fn derivative_changes_sign_at_most_once(q_n in queue(), q_m in queue(), (h_n, h_m) in ordered_gains()) {
        let p = uncapped();
        let mut changes = 0;
        let mut prev = pair_weight_derivative(q_n, q_m, h_n, h_m, 0.0, &p).signum();
        for k in 1..=2000 {
            let x = p.total_power_w * 10f64.powf(-12.0 * (1.0 - k as f64 / 2000.0));
            let s = pair_weight_derivative(q_n, q_m, h_n, h_m, x, &p).signum();
            if s != 0.0 && prev != 0.0 && s != prev {
                changes += 1;
            }
            if s != 0.0 {
                prev = s;
            }
        }
        prop_assert!(changes <= 1);
    }

    #[test]
    fn rates_are_monotone(h in gain(), dh in 0.0f64..1e-2, pw in 0.1f64..20.0, dp in 0.0f64..5.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let p = PhyParams::default();
        prop_assert!(rate_uniform(h, &p).unwrap() <= rate_uniform(h + dh, &p).unwrap());
        prop_assert!(rate_uniform(h, &p.with_power(pw)).unwrap() <= rate_uniform(h, &p.with_power(pw + dp)).unwrap());
        let (lo, hi) = (a.min(b) * p.total_power_w, a.max(b) * p.total_power_w);
        let s_lo = PowerSplit::from_incremental(lo, &p).unwrap();
        let s_hi = PowerSplit::from_incremental(hi, &p).unwrap();
        prop_assert!(rate_incremental(h, &s_lo, &p).unwrap() <= rate_incremental(h, &s_hi, &p).unwrap());
        prop_assert!(rate_base(h, &s_lo, &p).unwrap() >= rate_base(h, &s_hi, &p).unwrap());
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let p = uncapped();
    let mut rng = common::rng(21);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (
            common::log_uniform(&mut rng, -6.0, -1.0),
            common::log_uniform(&mut rng, -6.0, -1.0),
        );
        let (h_n, h_m) = (a.min(b), a.max(b));
        let (q_n, q_m) = (rng.gen_range(0.0..1e6), rng.gen_range(0.0..1e6));
        let x = common::log_uniform(&mut rng, -4.0, 0.0) * p.total_power_w * 0.9;
        let d = 1e-4 * x;
        let f = |t: f64| pair_weight(q_n, q_m, h_n, h_m, t, &p).unwrap();
        // fourth-order central stencil
        let fd = (-f(x + 2.0 * d) + 8.0 * f(x + d) - 8.0 * f(x - d) + f(x - 2.0 * d)) / (12.0 * d);
        let an = pair_weight_derivative(q_n, q_m, h_n, h_m, x, &p);
        worst = worst.max((fd - an).abs() / an.abs());
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}
