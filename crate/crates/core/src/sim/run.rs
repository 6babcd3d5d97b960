use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{ChannelProcess, FadingConfig, GainSource};
use crate::phy::PhyParams;
use crate::sched::{Modulation, Policy, ScheduleDecision};
use crate::sim::queue::QueueState;
use crate::sim::stability::{
    littles_delay, StabilityAssessment, StabilityThresholds, StabilityTracker,
};
use crate::sim::traffic::{ArrivalProcess, TrafficConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// `master_seed` is replaced by `seed` when the run starts.
    pub fading: FadingConfig,
    pub traffic: TrafficConfig,
    pub phy: PhyParams,
    pub policy: Policy,
    pub horizon_slots: u64,
    pub warmup_slots: u64,
    pub seed: u64,
    #[serde(default)]
    pub stability: StabilityThresholds,
    /// Keep every `series_every`-th slot in the report; 0 keeps none.
    #[serde(default = "default_series_every")]
    pub series_every: u64,
}

fn default_series_every() -> u64 {
    1
}

impl SimConfig {
    /// Reference 20-user cell with uniform load `total_pkts_per_slot`.
    pub fn standard(policy: Policy, total_pkts_per_slot: f64, seed: u64) -> Self {
        let fading = FadingConfig::default();
        let traffic = TrafficConfig::uniform(fading.n_users, total_pkts_per_slot);
        SimConfig {
            fading,
            traffic,
            phy: PhyParams::default(),
            policy,
            horizon_slots: 200_000,
            warmup_slots: 20_000,
            seed,
            stability: StabilityThresholds::default(),
            series_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading.validate()?;
        self.traffic.validate()?;
        self.phy.validate()?;
        if self.traffic.n_users() != self.fading.n_users {
            return Err(Error::config(
                "traffic.per_user_mean_pkts",
                format!(
                    "{} entries for {} users",
                    self.traffic.n_users(),
                    self.fading.n_users
                ),
            ));
        }
        if self.fading.n_users < self.policy.min_users() {
            return Err(Error::config(
                "policy",
                format!(
                    "{} needs at least {} users",
                    self.policy,
                    self.policy.min_users()
                ),
            ));
        }
        if self.horizon_slots == 0 || self.horizon_slots < 2 * self.warmup_slots {
            return Err(Error::config(
                "horizon_slots",
                format!(
                    "must be positive and at least twice warmup_slots ({})",
                    self.warmup_slots
                ),
            ));
        }
        Ok(())
    }
}

/// What happened in one slot.
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub t: u64,
    /// Backlogs (bits) the decision was made on.
    pub backlog_before: Vec<f64>,
    pub gains: Vec<f64>,
    pub decision: ScheduleDecision,
    pub arrivals: Vec<u64>,
    pub served: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: u64,
    pub q_total_bits: u64,
    pub mode: Modulation,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub seed: u64,
    pub slots: u64,
    pub measured_slots: u64,
    pub mean_total_backlog_bits: f64,
    pub mean_total_backlog_pkts: f64,
    pub per_user_mean_backlog_bits: Vec<f64>,
    pub offered_load_pkts_per_slot: f64,
    pub measured_arrival_pkts_per_slot: f64,
    pub throughput_pkts_per_slot: f64,
    pub delay_slots: Option<f64>,
    pub stability: StabilityAssessment,
    pub hierarchical_fraction: f64,
    pub pair_evaluations: u64,
    pub series: Vec<SeriesPoint>,
}

impl SimReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV columns `t,q_total_bits,q_total_pkts,mode,weight`.
    pub fn write_series_csv<W: Write>(&self, writer: W) -> Result<()> {
        let bits = self.config.traffic.packet_bits as f64;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "q_total_bits", "q_total_pkts", "mode", "weight"])?;
        for p in &self.series {
            w.write_record([
                p.t.to_string(),
                p.q_total_bits.to_string(),
                format!("{:.16e}", p.q_total_bits as f64 / bits),
                p.mode.as_str().to_string(),
                format!("{:.16e}", p.weight),
            ])?;
        }
        w.flush().map_err(|e| Error::Domain(e.to_string()))?;
        Ok(())
    }
}

/// Slot loop: channel, decision, arrivals, service.
pub struct Simulation<S: GainSource> {
    config: SimConfig,
    source: S,
    arrivals: ArrivalProcess,
    queues: QueueState,
    t: u64,
    gains: Vec<f64>,
    arrivals_buf: Vec<u64>,
}

impl Simulation<ChannelProcess> {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let fading = FadingConfig {
            master_seed: config.seed,
            ..config.fading.clone()
        };
        let source = ChannelProcess::new(fading)?;
        Self::with_source(config, source)
    }
}

impl<S: GainSource> Simulation<S> {
    /// Drives the loop from an arbitrary gain source, e.g. a replayed trace.
    pub fn with_source(config: SimConfig, source: S) -> Result<Self> {
        config.validate()?;
        if source.n_users() != config.fading.n_users {
            return Err(Error::config(
                "fading.n_users",
                format!(
                    "gain source has {} users, config has {}",
                    source.n_users(),
                    config.fading.n_users
                ),
            ));
        }
        let n = config.fading.n_users;
        Ok(Simulation {
            arrivals: ArrivalProcess::new(&config.traffic, config.seed)?,
            queues: QueueState::new(n),
            t: 0,
            gains: vec![0.0; n],
            arrivals_buf: vec![0; n],
            config,
            source,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn queues(&self) -> &QueueState {
        &self.queues
    }

    /// Advances one slot; `None` when the gain source is exhausted.
    pub fn step(&mut self) -> Result<Option<SlotOutcome>> {
        if !self.source.next_gains(&mut self.gains) {
            return Ok(None);
        }
        let backlog_before = self.queues.backlog_f64();
        let decision = self
            .config
            .policy
            .decide(&backlog_before, &self.gains, &self.config.phy)?;
        self.arrivals.next_into(&mut self.arrivals_buf);
        let served = self
            .queues
            .apply_service(&self.arrivals_buf, &decision.granted_rates);
        let outcome = SlotOutcome {
            t: self.t,
            backlog_before,
            gains: self.gains.clone(),
            decision,
            arrivals: self.arrivals_buf.clone(),
            served,
        };
        self.t += 1;
        Ok(Some(outcome))
    }

    /// Runs the full horizon and summarizes the post-warmup window.
    pub fn run(mut self) -> Result<SimReport> {
        let cfg = self.config.clone();
        let n = cfg.fading.n_users;
        let window = cfg.horizon_slots - cfg.warmup_slots;
        let mut tracker = StabilityTracker::new(window);
        let mut sum_total = 0.0;
        let mut per_user = vec![0.0; n];
        let mut arrived = 0u64;
        let mut departed = 0u64;
        let mut hm_slots = 0u64;
        let mut pair_evaluations = 0u64;
        let mut series = Vec::new();

        for t in 0..cfg.horizon_slots {
            let Some(out) = self.step()? else {
                return Err(Error::Domain(format!(
                    "gain source exhausted after {t} of {} slots",
                    cfg.horizon_slots
                )));
            };
            pair_evaluations += out.decision.pair_evaluations;
            let total = self.queues.total_bits();
            if cfg.series_every > 0 && t % cfg.series_every == 0 {
                series.push(SeriesPoint {
                    t,
                    q_total_bits: total,
                    mode: out.decision.mode,
                    weight: out.decision.weight,
                });
            }
            if t < cfg.warmup_slots {
                continue;
            }
            tracker.push(total as f64);
            sum_total += total as f64;
            for (acc, &q) in per_user.iter_mut().zip(&self.queues.backlog_bits) {
                *acc += q as f64;
            }
            arrived += out.arrivals.iter().sum::<u64>();
            departed += out.served.iter().sum::<u64>();
            if out.decision.mode == Modulation::Hierarchical {
                hm_slots += 1;
            }
        }

        let w = window as f64;
        let packet_bits = cfg.traffic.packet_bits as f64;
        let mean_total_bits = sum_total / w;
        let mean_total_pkts = mean_total_bits / packet_bits;
        let offered = cfg.traffic.total_pkts_per_slot();
        let stability = tracker.assess(cfg.traffic.total_bits_per_slot(), &cfg.stability);
        Ok(SimReport {
            seed: cfg.seed,
            slots: cfg.horizon_slots,
            measured_slots: window,
            mean_total_backlog_bits: mean_total_bits,
            mean_total_backlog_pkts: mean_total_pkts,
            per_user_mean_backlog_bits: per_user.iter().map(|s| s / w).collect(),
            offered_load_pkts_per_slot: offered,
            measured_arrival_pkts_per_slot: arrived as f64 / w / packet_bits,
            throughput_pkts_per_slot: departed as f64 / w / packet_bits,
            delay_slots: littles_delay(mean_total_pkts, offered),
            stability,
            hierarchical_fraction: hm_slots as f64 / w,
            pair_evaluations,
            series,
            config: cfg,
        })
    }
}

/// Runs one simulation with the built-in fading process.
pub fn run(config: SimConfig) -> Result<SimReport> {
    Simulation::new(config)?.run()
}
