//! Arrival-rate and transmit-power sweeps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, SweepAxis};
use crate::experiment::output::{num, opt_num, plot_data, write_atomic, write_json};
use crate::sched::Policy;
use crate::sim::{run, SimReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Arrival,
    Power,
}

impl SweepKind {
    fn of(axis: &SweepAxis) -> Self {
        match axis {
            SweepAxis::ArrivalTotal(_) => SweepKind::Arrival,
            SweepAxis::PowerW(_) => SweepKind::Power,
        }
    }

    fn stem(self) -> &'static str {
        match self {
            SweepKind::Arrival => "sweep_arrival",
            SweepKind::Power => "sweep_power",
        }
    }

    fn figure(self) -> &'static str {
        match self {
            SweepKind::Arrival => "fig1",
            SweepKind::Power => "fig2",
        }
    }
}

/// One (sweep value, policy, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub key: f64,
    pub policy: Policy,
    pub seed: u64,
    pub mean_total_backlog_pkts: f64,
    pub delay_slots: Option<f64>,
    pub verdict: Verdict,
    pub slope: f64,
}

impl SweepRow {
    fn from_report(key: f64, r: &SimReport) -> Self {
        SweepRow {
            key,
            policy: r.config.policy,
            seed: r.seed,
            mean_total_backlog_pkts: r.mean_total_backlog_pkts,
            delay_slots: r.delay_slots,
            verdict: r.stability.verdict,
            slope: r.stability.normalized_slope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Spread {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub key: f64,
    /// Stable only if every seed is stable; unstable if any seed is.
    pub verdict: Verdict,
    pub backlog_pkts: Spread,
    pub delay_slots: Option<Spread>,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: Policy,
    pub points: Vec<PointSummary>,
    /// Arrival sweeps: largest load such that it and every smaller load are
    /// stable. Power sweeps: smallest power such that it and every larger
    /// power are stable.
    pub frontier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub kind: SweepKind,
    pub mean_gain: f64,
    pub gain_spread_db: f64,
    /// Load held fixed during a power sweep, or power held fixed during a load sweep.
    pub fixed_value: f64,
    pub policies: Vec<PolicySummary>,
    /// MWDM frontier minus MWUM frontier (arrival sweeps only).
    pub frontier_gap_pkts: Option<f64>,
    /// The same gap as throughput: packets * packet_bits / T_s, in Mbit/s.
    pub frontier_gap_mbps: Option<f64>,
}

impl SweepSummary {
    pub fn policy(&self, p: Policy) -> Option<&PolicySummary> {
        self.policies.iter().find(|s| s.policy == p)
    }

    pub fn frontier(&self, p: Policy) -> Option<f64> {
        self.policy(p).and_then(|s| s.frontier)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

fn aggregate_verdict(verdicts: &[Verdict]) -> Verdict {
    if verdicts.iter().all(|v| *v == Verdict::Stable) {
        Verdict::Stable
    } else if verdicts.contains(&Verdict::Unstable) {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    }
}

/// Groups rows by policy and sweep value; rows need not be sorted.
pub fn summarize(cfg: &ExperimentConfig, kind: SweepKind, rows: &[SweepRow]) -> SweepSummary {
    let mut by_policy: BTreeMap<Policy, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        by_policy.entry(r.policy).or_default().push(r);
    }
    let mut policies = Vec::new();
    for (policy, mut rs) in by_policy {
        rs.sort_by(|a, b| a.key.total_cmp(&b.key).then(a.seed.cmp(&b.seed)));
        let mut points: Vec<PointSummary> = Vec::new();
        for group in rs.chunk_by(|a, b| a.key == b.key) {
            let verdicts: Vec<Verdict> = group.iter().map(|r| r.verdict).collect();
            let backlog: Vec<f64> = group.iter().map(|r| r.mean_total_backlog_pkts).collect();
            let delays: Vec<f64> = group.iter().filter_map(|r| r.delay_slots).collect();
            points.push(PointSummary {
                key: group[0].key,
                verdict: aggregate_verdict(&verdicts),
                backlog_pkts: Spread::of(&backlog).expect("nonempty group"),
                delay_slots: match kind {
                    SweepKind::Arrival => Spread::of(&delays),
                    SweepKind::Power => None,
                },
                seeds: group.len(),
            });
        }
        let stable = |p: &PointSummary| p.verdict == Verdict::Stable;
        let frontier = match kind {
            SweepKind::Arrival => points
                .iter()
                .take_while(|p| stable(p))
                .last()
                .map(|p| p.key),
            SweepKind::Power => points
                .iter()
                .rev()
                .take_while(|p| stable(p))
                .last()
                .map(|p| p.key),
        };
        policies.push(PolicySummary {
            policy,
            points,
            frontier,
        });
    }

    let mut summary = SweepSummary {
        scenario: cfg.scenario.clone(),
        kind,
        mean_gain: cfg.fading.mean_gain,
        gain_spread_db: cfg.fading.gain_spread_db,
        fixed_value: match kind {
            SweepKind::Arrival => cfg.phy.total_power_w,
            SweepKind::Power => cfg.traffic.total_load_pkts,
        },
        policies,
        frontier_gap_pkts: None,
        frontier_gap_mbps: None,
    };
    if kind == SweepKind::Arrival {
        if let (Some(d), Some(u)) = (
            summary.frontier(Policy::Mwdm),
            summary.frontier(Policy::Mwum),
        ) {
            let gap = d - u;
            summary.frontier_gap_pkts = Some(gap);
            summary.frontier_gap_mbps =
                Some(gap * cfg.traffic.packet_bits as f64 / cfg.phy.slot_duration_s / 1e6);
        }
    }
    summary
}

/// Runs every (value, policy, seed) combination of the configured sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let axis = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "no sweep axis configured"))?;
    let kind = SweepKind::of(axis);
    let mut jobs = Vec::new();
    for &key in axis.values() {
        for &policy in &cfg.policies {
            for &seed in &cfg.seeds {
                jobs.push((key, policy, seed));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(key, policy, seed)| {
            let sim = match kind {
                SweepKind::Arrival => cfg.sim_config(policy, seed, key, cfg.phy.total_power_w),
                SweepKind::Power => cfg.sim_config(policy, seed, cfg.traffic.total_load_pkts, key),
            };
            let sim = crate::sim::SimConfig {
                series_every: 0,
                ..sim
            };
            run(sim).map(|r| SweepRow::from_report(key, &r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by(|a, b| {
        a.key
            .total_cmp(&b.key)
            .then(a.policy.cmp(&b.policy))
            .then(a.seed.cmp(&b.seed))
    });
    let summary = summarize(cfg, kind, &rows);
    Ok(SweepOutcome { rows, summary })
}

pub fn sweep_csv(kind: SweepKind, rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match kind {
        SweepKind::Arrival => w.write_record([
            "load_pkts_per_slot",
            "policy",
            "seed",
            "mean_total_backlog_pkts",
            "delay_slots",
            "verdict",
            "slope",
        ])?,
        SweepKind::Power => w.write_record([
            "power_w",
            "policy",
            "seed",
            "mean_total_backlog_pkts",
            "verdict",
        ])?,
    }
    for r in rows {
        match kind {
            SweepKind::Arrival => w.write_record([
                num(r.key),
                r.policy.to_string(),
                r.seed.to_string(),
                num(r.mean_total_backlog_pkts),
                opt_num(r.delay_slots),
                r.verdict.to_string(),
                num(r.slope),
            ])?,
            SweepKind::Power => w.write_record([
                num(r.key),
                r.policy.to_string(),
                r.seed.to_string(),
                num(r.mean_total_backlog_pkts),
                r.verdict.to_string(),
            ])?,
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Parses a file written by [`sweep_csv`]. Power rows carry no delay or slope.
pub fn read_sweep_csv(kind: SweepKind, text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |line: usize, what: &str| Error::Domain(format!("row {line}: bad {what}"));
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let f = |k: usize| rec.get(k).ok_or_else(|| bad(line, "column count"));
        let float = |k: usize, what: &str| -> Result<f64> {
            f(k)?.parse::<f64>().map_err(|_| bad(line, what))
        };
        let key = float(0, "key")?;
        let policy: Policy = f(1)?.parse()?;
        let seed: u64 = f(2)?.parse().map_err(|_| bad(line, "seed"))?;
        let backlog = float(3, "backlog")?;
        let row = match kind {
            SweepKind::Arrival => SweepRow {
                key,
                policy,
                seed,
                mean_total_backlog_pkts: backlog,
                delay_slots: match f(4)? {
                    "" => None,
                    s => Some(s.parse().map_err(|_| bad(line, "delay"))?),
                },
                verdict: f(5)?.parse().map_err(|_| bad(line, "verdict"))?,
                slope: float(6, "slope")?,
            },
            SweepKind::Power => SweepRow {
                key,
                policy,
                seed,
                mean_total_backlog_pkts: backlog,
                delay_slots: None,
                verdict: f(4)?.parse().map_err(|_| bad(line, "verdict"))?,
                slope: f64::NAN,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Writes the CSV, the JSON summary and one plot-data file per policy.
pub fn write_sweep(outcome: &SweepOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let kind = outcome.summary.kind;
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{}.csv", kind.stem()));
    write_atomic(&csv_path, sweep_csv(kind, &outcome.rows)?.as_bytes())?;
    written.push(csv_path);
    let json_path = dir.join(format!("{}_summary.json", kind.stem()));
    write_json(&json_path, &outcome.summary)?;
    written.push(json_path);
    for ps in &outcome.summary.policies {
        let (cols, rows): (&[&str], Vec<Vec<f64>>) = match kind {
            SweepKind::Arrival => (
                &[
                    "load_pkts_per_slot",
                    "mean_total_backlog_pkts",
                    "delay_slots",
                ],
                ps.points
                    .iter()
                    .map(|p| {
                        vec![
                            p.key,
                            p.backlog_pkts.mean,
                            p.delay_slots.map_or(0.0, |d| d.mean),
                        ]
                    })
                    .collect(),
            ),
            SweepKind::Power => (
                &["power_w", "mean_total_backlog_pkts"],
                ps.points
                    .iter()
                    .map(|p| vec![p.key, p.backlog_pkts.mean])
                    .collect(),
            ),
        };
        let path = dir.join(format!("{}_{}.dat", kind.figure(), ps.policy));
        write_atomic(&path, plot_data(cols, &rows).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
