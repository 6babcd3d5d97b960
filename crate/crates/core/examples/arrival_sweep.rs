//! Stability frontier per policy over a short arrival-rate sweep.

use hmsched::experiment::{run_sweep, ExperimentConfig, SweepAxis};

fn main() -> hmsched::Result<()> {
    let cfg = ExperimentConfig {
        sweep: Some(SweepAxis::ArrivalTotal(vec![20.0, 26.0, 32.0, 38.0])),
        horizon_slots: 20_000,
        seeds: vec![1],
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg)?;
    for row in &out.rows {
        println!(
            "{:>5} {:<6} backlog {:>12.2} pkts  {}",
            row.key, row.policy, row.mean_total_backlog_pkts, row.verdict
        );
    }
    for p in &out.summary.policies {
        println!("{} frontier {:?}", p.policy, p.frontier);
    }
    Ok(())
}
