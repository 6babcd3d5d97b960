//! A single simulation run with summary metrics and a backlog series.

use hmsched::sim::run;
use hmsched::{Policy, SimConfig};

fn main() -> hmsched::Result<()> {
    let mut config = SimConfig::standard(Policy::Mwdm, 24.0, 1);
    config.horizon_slots = 20_000;
    config.warmup_slots = 2_000;
    config.series_every = 1_000;
    let report = run(config)?;

    println!(
        "offered      {:.3} pkts/slot",
        report.offered_load_pkts_per_slot
    );
    println!(
        "throughput   {:.3} pkts/slot",
        report.throughput_pkts_per_slot
    );
    println!("mean backlog {:.3} pkts", report.mean_total_backlog_pkts);
    println!("delay        {:?} slots", report.delay_slots);
    println!("HM slots     {:.1}%", 100.0 * report.hierarchical_fraction);
    println!("verdict      {}", report.stability.verdict);

    let mut csv = Vec::new();
    report.write_series_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
