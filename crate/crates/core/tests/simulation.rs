use hmsched::fading::ChannelTrace;
use hmsched::sched::mwum_decide;
use hmsched::sim::{run, ArrivalProcess, Simulation, TrafficConfig};
use hmsched::{ChannelProcess, FadingConfig, Policy, SimConfig, Verdict};

fn short(policy: Policy, load: f64, seed: u64, horizon: u64) -> SimConfig {
    SimConfig {
        horizon_slots: horizon,
        warmup_slots: horizon / 10,
        ..SimConfig::standard(policy, load, seed)
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    for policy in Policy::ALL {
        let a = run(short(policy, 25.0, 3, 5_000)).unwrap();
        let b = run(short(policy, 25.0, 3, 5_000)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_series_csv(&mut ca).unwrap();
        b.write_series_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
    }
}

#[test]
fn zero_traffic_stays_empty() {
    let r = run(short(Policy::Mwdm, 0.0, 1, 2_000)).unwrap();
    assert_eq!(r.mean_total_backlog_bits, 0.0);
    assert_eq!(r.throughput_pkts_per_slot, 0.0);
    assert_eq!(r.stability.verdict, Verdict::Stable);
    assert_eq!(r.delay_slots, None);
}

#[test]
fn replayed_trace_reproduces_live_run() {
    let cfg = short(Policy::Lmwdm, 28.0, 12, 4_000);
    let live = run(cfg.clone()).unwrap();
    let fading = FadingConfig {
        master_seed: cfg.seed,
        ..cfg.fading.clone()
    };
    let trace = ChannelTrace::record(&mut ChannelProcess::new(fading).unwrap(), 4_000);
    let mut csv = Vec::new();
    trace.write_csv(&mut csv).unwrap();
    let trace = ChannelTrace::read_csv(csv.as_slice()).unwrap();
    let replayed = Simulation::with_source(cfg, trace.replay())
        .unwrap()
        .run()
        .unwrap();
    assert_eq!(live, replayed);
}

#[test]
fn exhausted_trace_is_an_error() {
    let cfg = short(Policy::Mwum, 10.0, 1, 1_000);
    let trace = ChannelTrace::record(&mut ChannelProcess::new(cfg.fading.clone()).unwrap(), 10);
    assert!(Simulation::with_source(cfg, trace.replay())
        .unwrap()
        .run()
        .is_err());
}

#[test]
fn mwdm_weight_dominates_along_its_own_trajectory() {
    let mut sim = Simulation::new(short(Policy::Mwdm, 30.0, 4, 20_000)).unwrap();
    let params = sim.config().phy.clone();
    while let Some(out) = sim.step().unwrap() {
        let u = mwum_decide(&out.backlog_before, &out.gains, &params).unwrap();
        assert!(out.decision.weight >= u.weight, "slot {}", out.t);
        assert!(sim.queues().is_conserved());
        if out.t == 19_999 {
            break;
        }
    }
}

#[test]
fn mwdm_backlog_below_mwum_at_load_30() {
    for seed in [1, 2] {
        let u = run(SimConfig::standard(Policy::Mwum, 30.0, seed)).unwrap();
        let d = run(SimConfig::standard(Policy::Mwdm, 30.0, seed)).unwrap();
        assert!(
            d.mean_total_backlog_pkts < u.mean_total_backlog_pkts,
            "seed {seed}: {} vs {}",
            d.mean_total_backlog_pkts,
            u.mean_total_backlog_pkts
        );
    }
}

#[test]
fn batch_bernoulli_mean() {
    let traffic = TrafficConfig {
        per_user_mean_pkts: vec![1.5, 0.0, 4.0],
        batch_size_pkts: 4,
        packet_bits: 1024,
    };
    let mut arrivals = ArrivalProcess::new(&traffic, 8).unwrap();
    let mut buf = vec![0u64; 3];
    let mut sum = [0u64; 3];
    let slots = 1_000_000;
    for _ in 0..slots {
        arrivals.next_into(&mut buf);
        for u in 0..3 {
            assert!(buf[u] == 0 || buf[u] == 4096);
            sum[u] += buf[u];
        }
    }
    let mean = sum[0] as f64 / slots as f64;
    assert!((mean - 1536.0).abs() / 1536.0 <= 0.01, "{mean}");
    assert_eq!(sum[1], 0);
    assert_eq!(sum[2], 4096 * slots as u64);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = short(Policy::Mwum, 10.0, 1, 1_000);
    cfg.warmup_slots = 600;
    assert!(run(cfg).is_err());
    let mut cfg = short(Policy::Mwhm, 10.0, 1, 1_000);
    cfg.fading.n_users = 1;
    cfg.traffic = TrafficConfig::uniform(1, 1.0);
    assert!(run(cfg).is_err());
    let cfg = short(Policy::Mwum, 200.0, 1, 1_000);
    assert!(run(cfg).is_err());
}
