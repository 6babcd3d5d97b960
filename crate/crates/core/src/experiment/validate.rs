//! Randomized comparison of the closed-form power split against the grid oracle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::{
    grid_power_oracle_with, optimal_power_split, GridSpacing, PairWeightResult, PhyParams,
};
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerInstance {
    pub q_n: f64,
    pub q_m: f64,
    pub h_n: f64,
    pub h_m: f64,
}

/// Gains log-uniform in `[1e-6, 1e-1]` (ordered so `h_n <= h_m`), queues
/// uniform in `[0, 1e6]` bits.
pub fn random_instances(count: usize, seed: u64) -> Vec<PowerInstance> {
    let mut rng = substream(seed, Domain::Validation, 0);
    (0..count)
        .map(|_| {
            let a = 10f64.powf(rng.gen_range(-6.0..=-1.0));
            let b = 10f64.powf(rng.gen_range(-6.0..=-1.0));
            PowerInstance {
                q_n: rng.gen_range(0.0..=1e6),
                q_m: rng.gen_range(0.0..=1e6),
                h_n: a.min(b),
                h_m: a.max(b),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub index: usize,
    pub instance: PowerInstance,
    pub closed_form_weight: f64,
    pub grid_weight: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub count: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub spacing: GridSpacing,
    pub tolerance: f64,
    pub worst: Option<GapRecord>,
    pub failures: Vec<GapRecord>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn worst_gap(&self) -> f64 {
        self.worst.as_ref().map_or(0.0, |w| w.gap)
    }
}

/// Relative gap `|closed - grid| / max(grid, 1)`.
pub fn relative_gap(closed: f64, grid: f64) -> f64 {
    (closed - grid).abs() / grid.max(1.0)
}

/// Reference cell parameters used for validation: `P = 10`, `sigma = 1e-6`, uncapped.
pub fn validation_params() -> PhyParams {
    PhyParams::default().uncapped()
}

pub fn validate_power(
    count: usize,
    seed: u64,
    grid_points: usize,
    spacing: GridSpacing,
    tolerance: f64,
) -> Result<ValidationReport> {
    validate_power_with(count, seed, grid_points, spacing, tolerance, |i, p| {
        optimal_power_split(i.q_n, i.q_m, i.h_n, i.h_m, p)
    })
}

/// Same as [`validate_power`] with a caller-supplied closed form.
pub fn validate_power_with<F>(
    count: usize,
    seed: u64,
    grid_points: usize,
    spacing: GridSpacing,
    tolerance: f64,
    closed_form: F,
) -> Result<ValidationReport>
where
    F: Fn(&PowerInstance, &PhyParams) -> Result<PairWeightResult>,
{
    if count == 0 {
        return Err(Error::config("count", "must be at least 1"));
    }
    let params = validation_params();
    let mut report = ValidationReport {
        count,
        seed,
        grid_points,
        spacing,
        tolerance,
        worst: None,
        failures: Vec::new(),
    };
    for (index, inst) in random_instances(count, seed).into_iter().enumerate() {
        let closed = closed_form(&inst, &params)?;
        let grid = grid_power_oracle_with(
            inst.q_n,
            inst.q_m,
            inst.h_n,
            inst.h_m,
            &params,
            grid_points,
            spacing,
        )?;
        let rec = GapRecord {
            index,
            instance: inst,
            closed_form_weight: closed.weight,
            grid_weight: grid.weight,
            gap: relative_gap(closed.weight, grid.weight),
        };
        if rec.gap > tolerance {
            report.failures.push(rec.clone());
        }
        if report.worst.as_ref().is_none_or(|w| rec.gap > w.gap) {
            report.worst = Some(rec);
        }
    }
    Ok(report)
}
