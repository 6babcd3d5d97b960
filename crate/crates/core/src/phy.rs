//! Achievable per-slot rates and two-user power allocation.
//!
//! With user `n` on the base layer and user `m` on the incremental layer
//! (`h_n <= h_m`) and `p` Watts on the incremental layer, the pair weight is
//!
//! ```text
//!   f(p) = q_n * S * log2(1 + h_n (P - p) / (h_n p + sigma))
//!        + q_m * S * log2(1 + h_m p / sigma),          S = T_s * BW
//! ```
//!
//! `f'(p)` is proportional to `q_m h_m / (h_m p + sigma) - q_n h_n / (h_n p + sigma)`,
//! which has at most one root on `(0, P)`. The maximizer of `f` over `[0, P]`
//! is therefore one of `{0, p*, P}`, where `p*` is that root when it is a
//! local maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-stream rate limit `mu_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateCap {
    #[default]
    Uncapped,
    /// Absolute cap in bits per slot.
    Bits(f64),
    /// Cap expressed as a spectral efficiency in bit/s/Hz; multiplied by `T_s * BW`.
    SpectralEfficiency(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyParams {
    pub slot_duration_s: f64,
    pub bandwidth_hz: f64,
    pub total_power_w: f64,
    pub noise_power_w: f64,
    pub rate_cap: RateCap,
}

impl Default for PhyParams {
    fn default() -> Self {
        PhyParams {
            slot_duration_s: 1.67e-3,
            bandwidth_hz: 1.25e6,
            total_power_w: 10.0,
            noise_power_w: 1e-6,
            rate_cap: RateCap::Uncapped,
        }
    }
}

impl PhyParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("phy.slot_duration_s", self.slot_duration_s),
            ("phy.bandwidth_hz", self.bandwidth_hz),
            ("phy.total_power_w", self.total_power_w),
            ("phy.noise_power_w", self.noise_power_w),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be positive, got {v}")));
            }
        }
        match self.rate_cap {
            RateCap::Uncapped => {}
            RateCap::Bits(v) | RateCap::SpectralEfficiency(v) => {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::config(
                        "phy.rate_cap",
                        format!("must be positive, got {v}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Bits carried per slot per unit of spectral efficiency, `T_s * BW`.
    pub fn bits_per_hz_slot(&self) -> f64 {
        self.slot_duration_s * self.bandwidth_hz
    }

    /// `mu_max` in bits; infinite when uncapped.
    pub fn cap_bits(&self) -> f64 {
        match self.rate_cap {
            RateCap::Uncapped => f64::INFINITY,
            RateCap::Bits(b) => b,
            RateCap::SpectralEfficiency(se) => se * self.bits_per_hz_slot(),
        }
    }

    pub fn uncapped(&self) -> Self {
        PhyParams {
            rate_cap: RateCap::Uncapped,
            ..self.clone()
        }
    }

    pub fn with_power(&self, total_power_w: f64) -> Self {
        PhyParams {
            total_power_w,
            ..self.clone()
        }
    }

    #[inline]
    fn shannon(&self, snr: f64) -> f64 {
        (self.bits_per_hz_slot() * snr.ln_1p() / std::f64::consts::LN_2).min(self.cap_bits())
    }
}

fn check_gain(name: &str, h: f64) -> Result<()> {
    if h.is_nan() || h < 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be nonnegative, got {h}"
        )));
    }
    Ok(())
}

/// Power split between the two layers. The base power is always derived as
/// `P - incremental`, so the pair always spends exactly the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub base_power_w: f64,
    pub incremental_power_w: f64,
    pub interior: bool,
}

impl PowerSplit {
    pub fn from_incremental(incremental_power_w: f64, params: &PhyParams) -> Result<Self> {
        let p = params.total_power_w;
        if !(0.0..=p).contains(&incremental_power_w) {
            return Err(Error::Domain(format!(
                "incremental power {incremental_power_w} outside [0, {p}]"
            )));
        }
        Ok(Self::new_unchecked(incremental_power_w, p))
    }

    /// All power on the base layer.
    pub fn base_only(params: &PhyParams) -> Self {
        Self::new_unchecked(0.0, params.total_power_w)
    }

    /// All power on the incremental layer.
    pub fn incremental_only(params: &PhyParams) -> Self {
        Self::new_unchecked(params.total_power_w, params.total_power_w)
    }

    fn new_unchecked(incremental: f64, total: f64) -> Self {
        PowerSplit {
            base_power_w: total - incremental,
            incremental_power_w: incremental,
            interior: incremental > 0.0 && incremental < total,
        }
    }
}

/// Rate under uniform modulation: full power to one user.
pub fn rate_uniform(h: f64, params: &PhyParams) -> Result<f64> {
    check_gain("h", h)?;
    Ok(params.shannon(h * params.total_power_w / params.noise_power_w))
}

/// Base-layer rate; the incremental layer is seen as interference.
pub fn rate_base(h_n: f64, split: &PowerSplit, params: &PhyParams) -> Result<f64> {
    check_gain("h_n", h_n)?;
    Ok(base_unchecked(
        h_n,
        split.base_power_w,
        split.incremental_power_w,
        params,
    ))
}

/// Incremental-layer rate after the base layer has been cancelled.
pub fn rate_incremental(h_m: f64, split: &PowerSplit, params: &PhyParams) -> Result<f64> {
    check_gain("h_m", h_m)?;
    Ok(params.shannon(h_m * split.incremental_power_w / params.noise_power_w))
}

#[inline]
fn base_unchecked(h_n: f64, base_w: f64, incr_w: f64, params: &PhyParams) -> f64 {
    params.shannon(h_n * base_w / (h_n * incr_w + params.noise_power_w))
}

fn check_pair(q_n: f64, q_m: f64, h_n: f64, h_m: f64) -> Result<()> {
    check_gain("h_n", h_n)?;
    check_gain("h_m", h_m)?;
    if h_n > h_m {
        return Err(Error::Precondition(format!(
            "base-layer gain {h_n} exceeds incremental-layer gain {h_m}"
        )));
    }
    if q_n.is_nan() || q_n < 0.0 || q_m.is_nan() || q_m < 0.0 {
        return Err(Error::Domain(format!(
            "queue lengths must be nonnegative, got ({q_n}, {q_m})"
        )));
    }
    Ok(())
}

/// Second-order condition `q_n A <= q_m B` at incremental power `p_mi`, with
/// `A = h_n^2 / (h_n p + sigma)^2` and `B = h_m^2 / (h_m p + sigma)^2`.
pub fn concavity_condition(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    p_mi: f64,
    params: &PhyParams,
) -> Result<bool> {
    check_pair(q_n, q_m, h_n, h_m)?;
    if !(0.0..=params.total_power_w).contains(&p_mi) {
        return Err(Error::Domain(format!(
            "incremental power {p_mi} outside [0, {}]",
            params.total_power_w
        )));
    }
    Ok(concave_at(q_n, q_m, h_n, h_m, p_mi, params.noise_power_w))
}

#[inline]
fn concave_at(q_n: f64, q_m: f64, h_n: f64, h_m: f64, p: f64, sigma: f64) -> bool {
    let sqrt_a = h_n / (h_n * p + sigma);
    let sqrt_b = h_m / (h_m * p + sigma);
    q_n * sqrt_a * sqrt_a <= q_m * sqrt_b * sqrt_b
}

/// Root of the first-order condition, `sigma (q_m h_m - q_n h_n) / (h_n h_m (q_n - q_m))`.
///
/// `None` when the expression is undefined (equal queues or a zero gain).
/// The value is not clipped to `[0, P]`.
pub fn stationary_point(q_n: f64, q_m: f64, h_n: f64, h_m: f64, params: &PhyParams) -> Option<f64> {
    let denom = h_n * h_m * (q_n - q_m);
    if denom == 0.0 {
        return None;
    }
    let p = params.noise_power_w * (q_m * h_m - q_n * h_n) / denom;
    p.is_finite().then_some(p)
}

/// `-q_n sqrt(A) + q_m sqrt(B)` at `p_mi`; zero at a stationary point.
pub fn stationarity_residual(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    p_mi: f64,
    params: &PhyParams,
) -> f64 {
    let sigma = params.noise_power_w;
    -q_n * h_n / (h_n * p_mi + sigma) + q_m * h_m / (h_m * p_mi + sigma)
}

/// Analytic derivative `df/dp` of the (uncapped) pair weight in bits^2 per Watt.
pub fn pair_weight_derivative(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    p_mi: f64,
    params: &PhyParams,
) -> f64 {
    params.bits_per_hz_slot() / std::f64::consts::LN_2
        * stationarity_residual(q_n, q_m, h_n, h_m, p_mi, params)
}

/// Pair weight `q_n * rate_base + q_m * rate_incremental` at incremental power `p_mi`.
pub fn pair_weight(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    p_mi: f64,
    params: &PhyParams,
) -> Result<f64> {
    let split = PowerSplit::from_incremental(p_mi, params)?;
    Ok(q_n * rate_base(h_n, &split, params)? + q_m * rate_incremental(h_m, &split, params)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    Hierarchical,
    UniformFallback,
}

/// Which of the two users keeps the channel on a uniform fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Base,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWeightResult {
    pub weight: f64,
    pub split: PowerSplit,
    pub rate_base: f64,
    pub rate_incremental: f64,
    pub mode: PairMode,
    pub fallback_user: Option<Layer>,
}

impl PairWeightResult {
    fn base_fallback(q_n: f64, um_n: f64, params: &PhyParams) -> Self {
        PairWeightResult {
            weight: q_n * um_n,
            split: PowerSplit::base_only(params),
            rate_base: um_n,
            rate_incremental: 0.0,
            mode: PairMode::UniformFallback,
            fallback_user: Some(Layer::Base),
        }
    }

    fn incremental_fallback(q_m: f64, um_m: f64, params: &PhyParams) -> Self {
        PairWeightResult {
            weight: q_m * um_m,
            split: PowerSplit::incremental_only(params),
            rate_base: 0.0,
            rate_incremental: um_m,
            mode: PairMode::UniformFallback,
            fallback_user: Some(Layer::Incremental),
        }
    }
}

/// Exact maximizer of the pair weight over the candidate set `{0, p*, P}`.
///
/// Boundary optima fall back to uniform modulation with full power to the
/// implied user (`p = 0` serves the base user, `p = P` the incremental one).
/// Ties between candidates resolve to the boundary, base user first.
pub fn optimal_power_split(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    params: &PhyParams,
) -> Result<PairWeightResult> {
    check_pair(q_n, q_m, h_n, h_m)?;
    let um_n = rate_uniform(h_n, params)?;
    let um_m = rate_uniform(h_m, params)?;
    Ok(solve_pair(q_n, q_m, h_n, h_m, um_n, um_m, params))
}

/// Candidate-set solver with the two uniform rates precomputed.
///
/// Callers guarantee `0 <= h_n <= h_m` and nonnegative queues.
#[inline]
pub(crate) fn solve_pair(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    um_n: f64,
    um_m: f64,
    params: &PhyParams,
) -> PairWeightResult {
    let at_zero = q_n * um_n;
    let at_full = q_m * um_m;
    let mut best = if at_full > at_zero {
        PairWeightResult::incremental_fallback(q_m, um_m, params)
    } else {
        PairWeightResult::base_fallback(q_n, um_n, params)
    };

    if let Some(p) = stationary_point(q_n, q_m, h_n, h_m, params) {
        let total = params.total_power_w;
        if p > 0.0 && p < total && concave_at(q_n, q_m, h_n, h_m, p, params.noise_power_w) {
            let base = base_unchecked(h_n, total - p, p, params);
            let incr = params.shannon(h_m * p / params.noise_power_w);
            let weight = q_n * base + q_m * incr;
            if weight > best.weight {
                best = PairWeightResult {
                    weight,
                    split: PowerSplit::new_unchecked(p, total),
                    rate_base: base,
                    rate_incremental: incr,
                    mode: PairMode::Hierarchical,
                    fallback_user: None,
                };
            }
        }
    }
    best
}

/// Placement of the oracle's candidate powers on `[0, P]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridSpacing {
    /// `{0, P/(G-1), ..., P}`.
    #[default]
    Uniform,
    /// `0` plus `G - 1` log-spaced points from `1e-12 P` to `P`. Resolves
    /// optima far below the uniform spacing, which are common when
    /// `sigma / h` is small.
    Geometric,
}

impl GridSpacing {
    fn point(self, k: usize, grid_points: usize, total: f64) -> f64 {
        let last = grid_points - 1;
        if k == 0 {
            return 0.0;
        }
        if k == last {
            return total;
        }
        match self {
            GridSpacing::Uniform => total * k as f64 / last as f64,
            GridSpacing::Geometric => {
                let frac = (k - 1) as f64 / (last - 1) as f64;
                total * 10f64.powf(-12.0 * (1.0 - frac))
            }
        }
    }
}

/// Brute-force maximization of the pair weight over `grid_points` evenly
/// spaced incremental powers in `[0, P]`. Independent of the stationary
/// point analysis; used to verify [`optimal_power_split`].
pub fn grid_power_oracle(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    params: &PhyParams,
    grid_points: usize,
) -> Result<PairWeightResult> {
    grid_power_oracle_with(
        q_n,
        q_m,
        h_n,
        h_m,
        params,
        grid_points,
        GridSpacing::Uniform,
    )
}

/// [`grid_power_oracle`] with a choice of grid placement.
pub fn grid_power_oracle_with(
    q_n: f64,
    q_m: f64,
    h_n: f64,
    h_m: f64,
    params: &PhyParams,
    grid_points: usize,
    spacing: GridSpacing,
) -> Result<PairWeightResult> {
    check_pair(q_n, q_m, h_n, h_m)?;
    if grid_points < 1000 {
        return Err(Error::Precondition(format!(
            "grid needs at least 1000 points, got {grid_points}"
        )));
    }
    let total = params.total_power_w;
    let last = grid_points - 1;
    let mut best: Option<(usize, PowerSplit, f64, f64, f64)> = None;
    for k in 0..grid_points {
        let split = PowerSplit::from_incremental(spacing.point(k, grid_points, total), params)?;
        let rb = rate_base(h_n, &split, params)?;
        let ri = rate_incremental(h_m, &split, params)?;
        let w = q_n * rb + q_m * ri;
        if best.as_ref().is_none_or(|b| w > b.4) {
            best = Some((k, split, rb, ri, w));
        }
    }
    let (k, split, rb, ri, w) = best.expect("grid is nonempty");
    let (mode, fallback_user) = if k == 0 {
        (PairMode::UniformFallback, Some(Layer::Base))
    } else if k == last {
        (PairMode::UniformFallback, Some(Layer::Incremental))
    } else {
        (PairMode::Hierarchical, None)
    };
    Ok(PairWeightResult {
        weight: w,
        split,
        rate_base: rb,
        rate_incremental: ri,
        mode,
        fallback_user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell() -> PhyParams {
        PhyParams::default()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn uniform_rate_values() {
        let p = cell();
        assert_eq!(rate_uniform(0.0, &p).unwrap(), 0.0);
        // 1.67e-3 * 1.25e6 * log2(11)
        let expected = 2087.5 * 11f64.log2();
        assert!(close(rate_uniform(1e-6, &p).unwrap(), expected, 1e-12));
        assert!(close(expected, 7.2216e3, 1e-4));
        assert!(matches!(rate_uniform(-1e-9, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn cap_is_hard_min() {
        let p = PhyParams {
            rate_cap: RateCap::SpectralEfficiency(4.0),
            ..cell()
        };
        assert_eq!(p.cap_bits(), 2087.5 * 4.0);
        assert_eq!(rate_uniform(1e-3, &p).unwrap(), p.cap_bits());
        let b = PhyParams {
            rate_cap: RateCap::Bits(1000.0),
            ..cell()
        };
        assert_eq!(rate_uniform(1e-3, &b).unwrap(), 1000.0);
    }

    #[test]
    fn base_rate_cases() {
        let p = cell();
        let h = 3.3e-5;
        let all_base = PowerSplit::base_only(&p);
        assert_eq!(
            rate_base(h, &all_base, &p).unwrap(),
            rate_uniform(h, &p).unwrap()
        );
        let none = PowerSplit::incremental_only(&p);
        assert_eq!(rate_base(h, &none, &p).unwrap(), 0.0);

        let split = PowerSplit::from_incremental(1.25e-3, &p).unwrap();
        assert!(close(split.base_power_w, 9.99875, 1e-12));
        let expected = 2087.5 * (1.0 + 9.99875e-4 / 1.125e-6f64).log2();
        let got = rate_base(1e-4, &split, &p).unwrap();
        assert!(close(got, expected, 1e-12));
        assert!(close(got, 20451.86637480931, 1e-12));
    }

    #[test]
    fn incremental_rate_cases() {
        let p = cell();
        let h = 4.2e-4;
        assert_eq!(
            rate_incremental(h, &PowerSplit::base_only(&p), &p).unwrap(),
            0.0
        );
        assert_eq!(
            rate_incremental(h, &PowerSplit::incremental_only(&p), &p).unwrap(),
            rate_uniform(h, &p).unwrap()
        );
        let split = PowerSplit::from_incremental(1.25e-3, &p).unwrap();
        let got = rate_incremental(1e-3, &split, &p).unwrap();
        assert!(close(got, 2087.5 * 2.25f64.log2(), 1e-12));
        // frozen from an independent evaluation
        assert!(close(got, 2442.218440510827, 1e-12));
    }

    #[test]
    fn split_rejects_out_of_range() {
        let p = cell();
        assert!(PowerSplit::from_incremental(-0.1, &p).is_err());
        assert!(PowerSplit::from_incremental(10.5, &p).is_err());
        assert!(!PowerSplit::base_only(&p).interior);
        assert!(!PowerSplit::incremental_only(&p).interior);
        assert!(PowerSplit::from_incremental(5.0, &p).unwrap().interior);
    }

    #[test]
    fn concavity_examples() {
        let p = cell();
        for &pmi in &[0.0, 1e-3, 1.0, 10.0] {
            assert!(concavity_condition(5.0, 7.0, 1e-4, 1e-4, pmi, &p).unwrap());
            assert!(concavity_condition(9.0, 9.0, 1e-5, 1e-3, pmi, &p).unwrap());
        }
        assert!(concavity_condition(1000.0, 200.0, 1e-4, 1e-3, 1.25e-3, &p).unwrap());
        // q_n A and q_m B from the closed forms
        let a = (1e-4f64 / (1e-4 * 1.25e-3 + 1e-6)).powi(2);
        let b = (1e-3f64 / (1e-3 * 1.25e-3 + 1e-6)).powi(2);
        assert!(close(1000.0 * a, 7.90e6, 1e-3));
        assert!(close(200.0 * b, 3.95e7, 1e-3));
        assert!(matches!(
            concavity_condition(1.0, 1.0, 1e-3, 1e-4, 0.0, &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn interior_instance() {
        let p = cell();
        let r = optimal_power_split(1000.0, 200.0, 1e-4, 1e-3, &p).unwrap();
        assert_eq!(r.mode, PairMode::Hierarchical);
        assert!(r.split.interior);
        assert!(close(r.split.incremental_power_w, 1.25e-3, 1e-12));
        let g = grid_power_oracle(1000.0, 200.0, 1e-4, 1e-3, &p, 100_000).unwrap();
        assert!(r.weight >= g.weight);
        assert!((r.weight - g.weight) / g.weight < 1e-4);
        assert_eq!(r.weight, 1000.0 * r.rate_base + 200.0 * r.rate_incremental);
    }

    #[test]
    fn numerator_zero_is_boundary() {
        let p = cell();
        // q_m h_m == q_n h_n
        let (h_n, h_m) = (2f64.powi(-13), 2f64.powi(-10));
        let r = optimal_power_split(800.0, 100.0, h_n, h_m, &p).unwrap();
        assert_eq!(stationary_point(800.0, 100.0, h_n, h_m, &p), Some(0.0));
        assert_eq!(r.mode, PairMode::UniformFallback);
        assert!(!r.split.interior);
    }

    #[test]
    fn equal_queues_pick_best_boundary() {
        let p = cell();
        assert_eq!(stationary_point(50.0, 50.0, 1e-4, 1e-3, &p), None);
        let r = optimal_power_split(50.0, 50.0, 1e-4, 1e-3, &p).unwrap();
        assert_eq!(r.mode, PairMode::UniformFallback);
        assert_eq!(r.fallback_user, Some(Layer::Incremental));
        assert_eq!(r.rate_base, 0.0);
        assert_eq!(r.rate_incremental, rate_uniform(1e-3, &p).unwrap());
        assert_eq!(r.split.incremental_power_w, 10.0);
    }

    #[test]
    fn zero_gains() {
        let p = cell();
        let r = optimal_power_split(10.0, 20.0, 0.0, 0.0, &p).unwrap();
        assert_eq!(r.weight, 0.0);
        assert_eq!(r.mode, PairMode::UniformFallback);
        assert_eq!((r.rate_base, r.rate_incremental), (0.0, 0.0));
    }

    #[test]
    fn base_fallback_matches_uniform() {
        let p = cell();
        // huge base queue, tiny incremental queue: serve the base user alone
        let r = optimal_power_split(1e6, 1.0, 1e-4, 2e-4, &p).unwrap();
        assert_eq!(r.fallback_user, Some(Layer::Base));
        assert_eq!(r.rate_incremental, 0.0);
        assert_eq!(r.rate_base, rate_uniform(1e-4, &p).unwrap());
        assert_eq!(r.weight, 1e6 * r.rate_base);
    }

    #[test]
    fn grid_points_cover_interval() {
        for spacing in [GridSpacing::Uniform, GridSpacing::Geometric] {
            let pts: Vec<f64> = (0..1000).map(|k| spacing.point(k, 1000, 10.0)).collect();
            assert_eq!(pts[0], 0.0);
            assert_eq!(pts[999], 10.0);
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
        assert!((GridSpacing::Geometric.point(1, 1000, 10.0) - 1e-11).abs() < 1e-24);
    }

    #[test]
    fn geometric_grid_resolves_small_optimum() {
        // optimum near 1.9e-4 W, well below the uniform spacing of 1e-3 W
        let p = cell();
        let (q_n, q_m, h_n, h_m) = (
            980319.4831278516,
            600634.6182872208,
            0.007041561402224336,
            0.06633038402383895,
        );
        let r = optimal_power_split(q_n, q_m, h_n, h_m, &p).unwrap();
        assert_eq!(r.mode, PairMode::Hierarchical);
        let uni = grid_power_oracle(q_n, q_m, h_n, h_m, &p, 10_000).unwrap();
        let geo =
            grid_power_oracle_with(q_n, q_m, h_n, h_m, &p, 10_000, GridSpacing::Geometric).unwrap();
        assert!((r.weight - uni.weight) / uni.weight > 1e-2);
        assert!((r.weight - geo.weight).abs() / geo.weight < 1e-6);
        assert!(geo.weight <= r.weight);
    }

    #[test]
    fn oracle_rejects_coarse_grid() {
        assert!(grid_power_oracle(1.0, 2.0, 1e-4, 1e-3, &cell(), 999).is_err());
    }

    #[test]
    fn boundary_closed_form_not_beaten_by_grid() {
        let p = cell();
        let r = optimal_power_split(1e6, 1.0, 1e-4, 2e-4, &p).unwrap();
        let g = grid_power_oracle(1e6, 1.0, 1e-4, 2e-4, &p, 10_000).unwrap();
        assert!(g.weight <= r.weight + 1e-9 * r.weight);
    }
}
