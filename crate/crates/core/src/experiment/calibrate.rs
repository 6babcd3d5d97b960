//! Anchors the cell's mean channel gain so that uniform Max-Weight sits on
//! the edge of stability at a chosen load.
//!
//! The normalized backlog slope of MWUM at the anchor load decreases with
//! the mean gain, so a bisection over `log10(mean_gain)` finds the gain at
//! which it crosses the target slope.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::config::ExperimentConfig;
use crate::sched::Policy;
use crate::sim::{run, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    pub mean_gain: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub mean_gain: f64,
    pub anchor_load_pkts: f64,
    pub target_slope: f64,
    /// False when the target lies outside the slopes seen at the bounds;
    /// `mean_gain` is then the nearer bound.
    pub bracketed: bool,
    pub steps: Vec<CalibrationStep>,
}

impl CalibrationResult {
    pub fn apply(&self, cfg: &ExperimentConfig) -> ExperimentConfig {
        let mut out = cfg.clone();
        out.fading.mean_gain = self.mean_gain;
        out
    }
}

/// Mean normalized slope of MWUM at the anchor load, averaged over the calibration seeds.
pub fn anchor_slope(cfg: &ExperimentConfig, mean_gain: f64) -> Result<f64> {
    let c = &cfg.calibration;
    let slopes = c
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut sim = cfg.sim_config(
                Policy::Mwum,
                seed,
                c.anchor_load_pkts,
                cfg.phy.total_power_w,
            );
            sim.fading.mean_gain = mean_gain;
            let sim = match c.horizon_slots {
                Some(h) => SimConfig {
                    horizon_slots: h,
                    warmup_slots: h / 10,
                    ..sim
                },
                None => sim,
            };
            let sim = SimConfig {
                series_every: 0,
                ..sim
            };
            run(sim).map(|r| r.stability.normalized_slope)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(slopes.iter().sum::<f64>() / slopes.len() as f64)
}

pub fn calibrate(cfg: &ExperimentConfig) -> Result<CalibrationResult> {
    let c = &cfg.calibration;
    let target = c
        .target_slope
        .unwrap_or(0.5 * (cfg.stability.stable_slope + cfg.stability.unstable_slope));
    let mut steps = Vec::new();
    let mut eval = |g: f64| -> Result<f64> {
        let slope = anchor_slope(cfg, g)?;
        steps.push(CalibrationStep {
            mean_gain: g,
            slope,
        });
        Ok(slope)
    };
    let (mut lo, mut hi) = (c.gain_bounds[0].log10(), c.gain_bounds[1].log10());
    let at_lo = eval(10f64.powf(lo))?;
    let at_hi = eval(10f64.powf(hi))?;
    let (mean_gain, bracketed) = if at_lo <= target {
        (10f64.powf(lo), false)
    } else if at_hi > target {
        (10f64.powf(hi), false)
    } else {
        for _ in 0..c.iterations {
            let mid = 0.5 * (lo + hi);
            if eval(10f64.powf(mid))? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (10f64.powf(0.5 * (lo + hi)), true)
    };
    Ok(CalibrationResult {
        mean_gain,
        anchor_load_pkts: c.anchor_load_pkts,
        target_slope: target,
        bracketed,
        steps,
    })
}
