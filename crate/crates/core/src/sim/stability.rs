//! Empirical stability verdict and Little's-law delay.
//!
//! A run is judged on the least-squares slope of its total backlog over the
//! post-warmup window, expressed as a fraction of the mean offered load.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" => Ok(Verdict::Stable),
            "unstable" => Ok(Verdict::Unstable),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(format!("unknown verdict `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityThresholds {
    /// Normalized slope above which a run is unstable.
    pub unstable_slope: f64,
    /// Normalized slope below which a run may be called stable.
    pub stable_slope: f64,
    /// A stable run's final backlog must not exceed this multiple of the
    /// first-quarter mean.
    pub growth_ratio: f64,
}

impl Default for StabilityThresholds {
    fn default() -> Self {
        StabilityThresholds {
            unstable_slope: 0.025,
            stable_slope: 0.01,
            growth_ratio: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityAssessment {
    pub verdict: Verdict,
    pub normalized_slope: f64,
    pub slope_bits_per_slot: f64,
    pub first_quarter_mean_bits: f64,
    pub final_backlog_bits: f64,
}

fn classify(
    slope: f64,
    mean_arrival_bits: f64,
    first_quarter_mean: f64,
    final_backlog: f64,
    thr: &StabilityThresholds,
) -> StabilityAssessment {
    let normalized = if slope == 0.0 {
        0.0
    } else {
        slope / mean_arrival_bits.max(1.0)
    };
    let verdict = if normalized > thr.unstable_slope {
        Verdict::Unstable
    } else if normalized < thr.stable_slope
        && final_backlog <= thr.growth_ratio * first_quarter_mean
    {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    };
    StabilityAssessment {
        verdict,
        normalized_slope: normalized,
        slope_bits_per_slot: slope,
        first_quarter_mean_bits: first_quarter_mean,
        final_backlog_bits: final_backlog,
    }
}

/// Verdict on a post-warmup total-backlog series (bits per slot).
pub fn stability_verdict(
    series: &[f64],
    mean_arrival_bits: f64,
    thresholds: &StabilityThresholds,
) -> StabilityAssessment {
    let n = series.len();
    if n == 0 {
        return classify(0.0, mean_arrival_bits, 0.0, 0.0, thresholds);
    }
    let nf = n as f64;
    let mean_t = (nf - 1.0) / 2.0;
    let mean_y = series.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, &y) in series.iter().enumerate() {
        let dt = t as f64 - mean_t;
        sxy += dt * (y - mean_y);
        sxx += dt * dt;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let quarter = (n / 4).max(1);
    let first_quarter = series[..quarter].iter().sum::<f64>() / quarter as f64;
    classify(
        slope,
        mean_arrival_bits,
        first_quarter,
        series[n - 1],
        thresholds,
    )
}

/// Streaming equivalent of [`stability_verdict`] for a window of known length.
#[derive(Debug, Clone)]
pub struct StabilityTracker {
    window: u64,
    quarter: u64,
    n: u64,
    mean_t: f64,
    mean_y: f64,
    cxy: f64,
    m2t: f64,
    quarter_sum: f64,
    last: f64,
}

impl StabilityTracker {
    pub fn new(window: u64) -> Self {
        StabilityTracker {
            window,
            quarter: (window / 4).max(1),
            n: 0,
            mean_t: 0.0,
            mean_y: 0.0,
            cxy: 0.0,
            m2t: 0.0,
            quarter_sum: 0.0,
            last: 0.0,
        }
    }

    pub fn push(&mut self, y: f64) {
        let t = self.n as f64;
        self.n += 1;
        let nf = self.n as f64;
        let dt = t - self.mean_t;
        self.mean_t += dt / nf;
        self.mean_y += (y - self.mean_y) / nf;
        self.cxy += dt * (y - self.mean_y);
        self.m2t += dt * (t - self.mean_t);
        if self.n <= self.quarter {
            self.quarter_sum += y;
        }
        self.last = y;
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn assess(
        &self,
        mean_arrival_bits: f64,
        thresholds: &StabilityThresholds,
    ) -> StabilityAssessment {
        let slope = if self.m2t > 0.0 {
            self.cxy / self.m2t
        } else {
            0.0
        };
        let quarter = self.quarter.min(self.n).max(1);
        classify(
            slope,
            mean_arrival_bits,
            self.quarter_sum / quarter as f64,
            self.last,
            thresholds,
        )
    }
}

/// Mean delay in slots, `L / lambda`; `None` without traffic.
pub fn littles_delay(mean_backlog_pkts: f64, arrival_rate_pkts: f64) -> Option<f64> {
    (arrival_rate_pkts > 0.0).then(|| mean_backlog_pkts / arrival_rate_pkts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOAD_BITS: f64 = 30.0 * 1024.0;

    #[test]
    fn constant_is_stable() {
        let s = vec![5e4; 1000];
        let a = stability_verdict(&s, LOAD_BITS, &StabilityThresholds::default());
        assert_eq!(a.verdict, Verdict::Stable);
        assert_eq!(a.normalized_slope, 0.0);
    }

    #[test]
    fn zero_series_is_stable() {
        let s = vec![0.0; 1000];
        let a = stability_verdict(&s, 0.0, &StabilityThresholds::default());
        assert_eq!(a.verdict, Verdict::Stable);
    }

    #[test]
    fn linear_growth_levels() {
        let thr = StabilityThresholds::default();
        // 1 packet/slot at load 30
        let one: Vec<f64> = (0..10_000).map(|t| 1024.0 * t as f64).collect();
        let a = stability_verdict(&one, LOAD_BITS, &thr);
        assert!((a.normalized_slope - 1.0 / 30.0).abs() < 1e-9);
        assert_eq!(a.verdict, Verdict::Unstable);
        // 0.5 packet/slot sits between the two thresholds
        let half: Vec<f64> = (0..10_000).map(|t| 512.0 * t as f64).collect();
        assert_eq!(
            stability_verdict(&half, LOAD_BITS, &thr).verdict,
            Verdict::Inconclusive
        );
        let fast: Vec<f64> = (0..10_000).map(|t| 2048.0 * t as f64).collect();
        let a = stability_verdict(&fast, LOAD_BITS, &thr);
        assert_eq!(a.verdict, Verdict::Unstable);
        assert!((a.normalized_slope - 1.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn late_burst_is_not_stable() {
        let mut s = vec![100.0; 1000];
        *s.last_mut().unwrap() = 1e6;
        let a = stability_verdict(&s, LOAD_BITS, &StabilityThresholds::default());
        assert_ne!(a.verdict, Verdict::Stable);
    }

    #[test]
    fn tracker_matches_batch() {
        let thr = StabilityThresholds::default();
        let series: Vec<f64> = (0..5000)
            .map(|t| 1e4 + 300.0 * (t as f64 * 0.37).sin() + 0.5 * t as f64)
            .collect();
        let mut tr = StabilityTracker::new(series.len() as u64);
        for &y in &series {
            tr.push(y);
        }
        let a = stability_verdict(&series, LOAD_BITS, &thr);
        let b = tr.assess(LOAD_BITS, &thr);
        assert_eq!(a.verdict, b.verdict);
        assert!((a.slope_bits_per_slot - b.slope_bits_per_slot).abs() < 1e-9);
        assert_eq!(a.first_quarter_mean_bits, b.first_quarter_mean_bits);
        assert_eq!(a.final_backlog_bits, b.final_backlog_bits);
    }

    #[test]
    fn littles_law() {
        assert_eq!(littles_delay(60.0, 30.0), Some(2.0));
        assert_eq!(littles_delay(0.0, 30.0), Some(0.0));
        assert_eq!(littles_delay(5.0, 0.0), None);
    }
}
