use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::Result;
use crate::experiment::config::ExperimentConfig;
use crate::experiment::output::{write_atomic, write_json};
use crate::sim::{run, SimReport};

/// One simulation per (policy, seed) at the configured load and power,
/// ordered by policy then seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SimReport>> {
    let jobs: Vec<_> = cfg
        .policies
        .iter()
        .flat_map(|&p| cfg.seeds.iter().map(move |&s| (p, s)))
        .collect();
    jobs.par_iter()
        .map(|&(policy, seed)| {
            run(cfg.sim_config(
                policy,
                seed,
                cfg.traffic.total_load_pkts,
                cfg.phy.total_power_w,
            ))
        })
        .collect()
}

/// `run_<policy>_seed<seed>.json` and `series_<policy>_seed<seed>.csv` per report.
pub fn write_run_reports(reports: &[SimReport], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for r in reports {
        let stem = format!("{}_seed{}", r.config.policy, r.seed);
        let json = dir.join(format!("run_{stem}.json"));
        write_json(&json, r)?;
        written.push(json);
        let mut buf = Vec::new();
        r.write_series_csv(&mut buf)?;
        let csv = dir.join(format!("series_{stem}.csv"));
        write_atomic(&csv, &buf)?;
        written.push(csv);
    }
    Ok(written)
}
