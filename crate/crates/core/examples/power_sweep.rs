//! Minimum stabilizing transmit power per policy at a fixed load.

use hmsched::experiment::{run_sweep, write_sweep, ExperimentConfig, SweepAxis};

fn main() -> hmsched::Result<()> {
    let dir = std::env::temp_dir().join("hmsched_power_sweep");
    let cfg = ExperimentConfig {
        sweep: Some(SweepAxis::PowerW(vec![1.0, 3.0, 10.0])),
        horizon_slots: 20_000,
        seeds: vec![1],
        out_dir: dir.clone(),
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg)?;
    for p in &out.summary.policies {
        let backlogs: Vec<String> = p
            .points
            .iter()
            .map(|pt| format!("{}W:{:.1}", pt.key, pt.backlog_pkts.mean))
            .collect();
        println!(
            "{:<6} P_min {:?}  {}",
            p.policy,
            p.frontier,
            backlogs.join(" ")
        );
    }
    for path in write_sweep(&out, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
