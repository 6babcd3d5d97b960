//! Max-Weight decision rules.
//!
//! Every policy is a pure function of the backlogs `q` (bits), the gains `h`
//! and the physical parameters. Ties go to the lowest user index; pair ties
//! go to the lexicographically smallest `(i, j)` with `i < j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::{self, PairMode, PairWeightResult, PhyParams, PowerSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Mwum,
    Mwhm,
    Mwdm,
    Lmwdm,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Mwum, Policy::Mwhm, Policy::Mwdm, Policy::Lmwdm];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Mwum => "mwum",
            Policy::Mwhm => "mwhm",
            Policy::Mwdm => "mwdm",
            Policy::Lmwdm => "lmwdm",
        }
    }

    pub fn min_users(self) -> usize {
        match self {
            Policy::Mwhm => 2,
            _ => 1,
        }
    }

    pub fn decide(self, q: &[f64], h: &[f64], params: &PhyParams) -> Result<ScheduleDecision> {
        match self {
            Policy::Mwum => mwum_decide(q, h, params),
            Policy::Mwhm => mwhm_decide(q, h, params),
            Policy::Mwdm => mwdm_decide(q, h, params),
            Policy::Lmwdm => lmwdm_decide(q, h, params),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mwum" => Ok(Policy::Mwum),
            "mwhm" => Ok(Policy::Mwhm),
            "mwdm" => Ok(Policy::Mwdm),
            "lmwdm" | "l-mwdm" => Ok(Policy::Lmwdm),
            other => Err(Error::config(
                "policy",
                format!("unknown policy `{other}` (expected mwum, mwhm, mwdm or lmwdm)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    Uniform,
    Hierarchical,
}

impl Modulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Modulation::Uniform => "uniform",
            Modulation::Hierarchical => "hierarchical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Served {
    Single(usize),
    /// `base` has the weaker (or equal, lower-index) channel.
    Pair {
        base: usize,
        incremental: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDecision {
    pub mode: Modulation,
    pub served: Served,
    pub split: PowerSplit,
    /// Bits granted to each user this slot; zero for unserved users.
    pub granted_rates: Vec<f64>,
    pub weight: f64,
    pub pair_evaluations: u64,
}

fn check_inputs(q: &[f64], h: &[f64], min_users: usize) -> Result<()> {
    if q.len() != h.len() {
        return Err(Error::Precondition(format!(
            "{} queues but {} gains",
            q.len(),
            h.len()
        )));
    }
    if q.len() < min_users {
        return Err(Error::Precondition(format!(
            "policy needs at least {min_users} users, got {}",
            q.len()
        )));
    }
    if let Some(n) = q.iter().position(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::Domain(format!("queue of user {n} is {}", q[n])));
    }
    if let Some(n) = h.iter().position(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::Domain(format!("gain of user {n} is {}", h[n])));
    }
    Ok(())
}

/// Per-slot quantities shared by all policies.
struct Slot<'a> {
    q: &'a [f64],
    h: &'a [f64],
    params: &'a PhyParams,
    uniform_rate: Vec<f64>,
}

impl<'a> Slot<'a> {
    fn new(q: &'a [f64], h: &'a [f64], params: &'a PhyParams) -> Self {
        let uniform_rate = h
            .iter()
            .map(|&g| phy::rate_uniform(g, params).expect("gains checked"))
            .collect();
        Slot {
            q,
            h,
            params,
            uniform_rate,
        }
    }

    fn n(&self) -> usize {
        self.q.len()
    }

    fn uniform(&self) -> ScheduleDecision {
        let mut best = 0;
        let mut best_w = self.q[0] * self.uniform_rate[0];
        for n in 1..self.n() {
            let w = self.q[n] * self.uniform_rate[n];
            if w > best_w {
                best = n;
                best_w = w;
            }
        }
        self.single(best, 0)
    }

    fn single(&self, user: usize, pair_evaluations: u64) -> ScheduleDecision {
        let mut granted_rates = vec![0.0; self.n()];
        granted_rates[user] = self.uniform_rate[user];
        ScheduleDecision {
            mode: Modulation::Uniform,
            served: Served::Single(user),
            split: PowerSplit::base_only(self.params),
            granted_rates,
            weight: self.q[user] * self.uniform_rate[user],
            pair_evaluations,
        }
    }

    /// Channel-ordered roles for users `i` and `j`.
    fn roles(&self, i: usize, j: usize) -> (usize, usize) {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if self.h[lo] <= self.h[hi] {
            (lo, hi)
        } else {
            (hi, lo)
        }
    }

    fn pair(&self, i: usize, j: usize) -> (usize, usize, PairWeightResult) {
        let (base, incr) = self.roles(i, j);
        let r = phy::solve_pair(
            self.q[base],
            self.q[incr],
            self.h[base],
            self.h[incr],
            self.uniform_rate[base],
            self.uniform_rate[incr],
            self.params,
        );
        (base, incr, r)
    }

    fn pair_decision(
        &self,
        (base, incr, r): (usize, usize, PairWeightResult),
        pair_evaluations: u64,
    ) -> ScheduleDecision {
        match (r.mode, r.fallback_user) {
            (PairMode::Hierarchical, _) => {
                let mut granted_rates = vec![0.0; self.n()];
                granted_rates[base] = r.rate_base;
                granted_rates[incr] = r.rate_incremental;
                ScheduleDecision {
                    mode: Modulation::Hierarchical,
                    served: Served::Pair {
                        base,
                        incremental: incr,
                    },
                    split: r.split,
                    granted_rates,
                    weight: r.weight,
                    pair_evaluations,
                }
            }
            (PairMode::UniformFallback, Some(phy::Layer::Incremental)) => {
                self.single(incr, pair_evaluations)
            }
            (PairMode::UniformFallback, _) => self.single(base, pair_evaluations),
        }
    }

    /// Best pair over `pairs`, visited in the given order; first maximum wins.
    fn best_pair(
        &self,
        pairs: impl Iterator<Item = (usize, usize)>,
    ) -> Option<((usize, usize, PairWeightResult), u64)> {
        let mut best: Option<(usize, usize, PairWeightResult)> = None;
        let mut count = 0;
        for (i, j) in pairs {
            count += 1;
            let cand = self.pair(i, j);
            if best.as_ref().is_none_or(|b| cand.2.weight > b.2.weight) {
                best = Some(cand);
            }
        }
        best.map(|b| (b, count))
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Serves the single user with the largest `q_n * mu_n^um`.
pub fn mwum_decide(q: &[f64], h: &[f64], params: &PhyParams) -> Result<ScheduleDecision> {
    check_inputs(q, h, 1)?;
    Ok(Slot::new(q, h, params).uniform())
}

/// Serves the best channel-ordered pair; a pair whose optimum lies on the
/// power boundary contributes the better of its two uniform weights.
pub fn mwhm_decide(q: &[f64], h: &[f64], params: &PhyParams) -> Result<ScheduleDecision> {
    check_inputs(q, h, 2)?;
    let slot = Slot::new(q, h, params);
    let (best, count) = slot
        .best_pair(all_pairs(slot.n()))
        .expect("at least one pair");
    Ok(slot.pair_decision(best, count))
}

/// Evaluates every pair and switches to hierarchical modulation only when
/// its best weight strictly exceeds the uniform Max-Weight.
pub fn mwdm_decide(q: &[f64], h: &[f64], params: &PhyParams) -> Result<ScheduleDecision> {
    check_inputs(q, h, 1)?;
    let slot = Slot::new(q, h, params);
    let uniform = slot.uniform();
    match slot.best_pair(all_pairs(slot.n())) {
        None => Ok(uniform),
        Some((best, count)) => Ok(choose(&slot, uniform, best, count)),
    }
}

/// Like [`mwdm_decide`] but only pairs the uniform winner with each other
/// user, so `N - 1` pairs are evaluated instead of `N (N - 1) / 2`.
pub fn lmwdm_decide(q: &[f64], h: &[f64], params: &PhyParams) -> Result<ScheduleDecision> {
    check_inputs(q, h, 1)?;
    let slot = Slot::new(q, h, params);
    let uniform = slot.uniform();
    let Served::Single(star) = uniform.served else {
        unreachable!("uniform decision serves one user")
    };
    let pairs = (0..slot.n()).filter(|&m| m != star).map(|m| (star, m));
    match slot.best_pair(pairs) {
        None => Ok(uniform),
        Some((best, count)) => Ok(choose(&slot, uniform, best, count)),
    }
}

fn choose(
    slot: &Slot<'_>,
    mut uniform: ScheduleDecision,
    best: (usize, usize, PairWeightResult),
    count: u64,
) -> ScheduleDecision {
    if best.2.weight > uniform.weight {
        slot.pair_decision(best, count)
    } else {
        uniform.pair_evaluations = count;
        uniform
    }
}
