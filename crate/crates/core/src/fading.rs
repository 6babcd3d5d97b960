//! Slot-sampled correlated Rayleigh fading.
//!
//! Each user owns an independent sum-of-sinusoids process with unit mean
//! power. The in-phase and quadrature branches use `M` oscillators whose
//! arrival angles are spread over a quarter circle with a random rotation:
//!
//! ```text
//!   alpha_k = (2*pi*k - pi + theta) / (4M),          k = 1..M
//!   I(t)    = sqrt(1/M) * sum_k cos(2*pi*f_d*cos(alpha_k)*t + phi_k)
//!   Q(t)    = sqrt(1/M) * sum_k cos(2*pi*f_d*sin(alpha_k)*t + psi_k)
//!   h(t)    = mean_gain * (I(t)^2 + Q(t)^2)
//! ```
//!
//! The time-averaged autocorrelation of `I` is `(1/M) sum_k cos(2*pi*f_d*cos(alpha_k)*tau)`,
//! a quadrature rule for `J0(2*pi*f_d*tau)`.
//!
//! Gains are sampled once per slot (block fading).

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, Domain};

/// Oscillator state is recomputed from the closed form every this many slots
/// so that rounding in the phasor recursion cannot accumulate.
const RESYNC_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FadingConfig {
    pub n_users: usize,
    pub slot_duration_s: f64,
    /// Closed Doppler interval `[lo, hi]` in Hz.
    pub doppler_range_hz: [f64; 2],
    /// Linear mean power gain `E[h_n]`, shared by every user unless
    /// `per_user_mean_gain` is given.
    pub mean_gain: f64,
    /// Spreads per-user mean gains log-uniformly over this many dB, centered
    /// on `mean_gain` (user 0 weakest). Models users at different distances.
    pub gain_spread_db: f64,
    pub per_user_mean_gain: Option<Vec<f64>>,
    pub n_oscillators: usize,
    pub master_seed: u64,
}

impl Default for FadingConfig {
    fn default() -> Self {
        FadingConfig {
            n_users: 20,
            slot_duration_s: 1.67e-3,
            doppler_range_hz: [5.0, 15.0],
            mean_gain: 1e-3,
            gain_spread_db: 0.0,
            per_user_mean_gain: None,
            n_oscillators: 16,
            master_seed: 0,
        }
    }
}

impl FadingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::config("fading.n_users", "must be positive"));
        }
        if !(self.slot_duration_s > 0.0 && self.slot_duration_s.is_finite()) {
            return Err(Error::config("fading.slot_duration_s", "must be positive"));
        }
        let [lo, hi] = self.doppler_range_hz;
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
            return Err(Error::config(
                "fading.doppler_range_hz",
                "lower bound must be positive and finite",
            ));
        }
        if lo > hi {
            return Err(Error::config(
                "fading.doppler_range_hz",
                format!("empty interval [{lo}, {hi}]"),
            ));
        }
        if !(self.mean_gain > 0.0 && self.mean_gain.is_finite()) {
            return Err(Error::config("fading.mean_gain", "must be positive"));
        }
        if !(self.gain_spread_db >= 0.0 && self.gain_spread_db.is_finite()) {
            return Err(Error::config(
                "fading.gain_spread_db",
                "must be nonnegative",
            ));
        }
        if let Some(gains) = &self.per_user_mean_gain {
            if gains.len() != self.n_users {
                return Err(Error::config(
                    "fading.per_user_mean_gain",
                    format!("expected {} entries, got {}", self.n_users, gains.len()),
                ));
            }
            if gains.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
                return Err(Error::config(
                    "fading.per_user_mean_gain",
                    "every entry must be positive",
                ));
            }
        }
        if self.n_oscillators < 8 {
            return Err(Error::config("fading.n_oscillators", "must be at least 8"));
        }
        Ok(())
    }

    /// Mean gain of `user` after applying the spread or explicit overrides.
    pub fn user_mean_gain(&self, user: usize) -> f64 {
        if let Some(g) = &self.per_user_mean_gain {
            return g[user];
        }
        if self.gain_spread_db == 0.0 || self.n_users < 2 {
            return self.mean_gain;
        }
        let pos = user as f64 / (self.n_users - 1) as f64 - 0.5;
        self.mean_gain * 10f64.powf(self.gain_spread_db * pos / 10.0)
    }
}

/// Per-slot channel power gains, one entry per user.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector(Vec<f64>);

impl GainVector {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        if let Some((n, g)) = gains
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.is_finite() && **g >= 0.0))
        {
            return Err(Error::Domain(format!("gain of user {n} is {g}")));
        }
        Ok(GainVector(gains))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for GainVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Complex baseband fading coefficient with unit mean power.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coefficient {
    pub re: f64,
    pub im: f64,
}

impl Coefficient {
    pub fn power(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

#[derive(Debug, Clone)]
struct Oscillator {
    /// Angular frequency times slot duration (radians per slot).
    step: f64,
    phase: f64,
    // current phasor and per-slot rotation
    re: f64,
    im: f64,
    rot_re: f64,
    rot_im: f64,
}

impl Oscillator {
    fn new(omega: f64, slot: f64, phase: f64) -> Self {
        let step = omega * slot;
        let mut osc = Oscillator {
            step,
            phase,
            re: 0.0,
            im: 0.0,
            rot_re: step.cos(),
            rot_im: step.sin(),
        };
        osc.resync(0);
        osc
    }

    fn resync(&mut self, t: u64) {
        let arg = self.step * t as f64 + self.phase;
        self.re = arg.cos();
        self.im = arg.sin();
    }

    fn advance(&mut self) {
        let re = self.re * self.rot_re - self.im * self.rot_im;
        let im = self.re * self.rot_im + self.im * self.rot_re;
        self.re = re;
        self.im = im;
    }
}

#[derive(Debug, Clone)]
struct UserChannel {
    doppler_hz: f64,
    mean_gain: f64,
    in_phase: Vec<Oscillator>,
    quadrature: Vec<Oscillator>,
    scale: f64,
}

impl UserChannel {
    fn new(config: &FadingConfig, user: usize) -> Self {
        let mut rng = substream(config.master_seed, Domain::Fading, user as u64);
        let [lo, hi] = config.doppler_range_hz;
        let doppler_hz = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        let m = config.n_oscillators;
        let theta = rng.gen_range(-PI..PI);
        let omega_d = 2.0 * PI * doppler_hz;
        let mut in_phase = Vec::with_capacity(m);
        let mut quadrature = Vec::with_capacity(m);
        for k in 1..=m {
            let alpha = (2.0 * PI * k as f64 - PI + theta) / (4.0 * m as f64);
            let phi = rng.gen_range(-PI..PI);
            let psi = rng.gen_range(-PI..PI);
            in_phase.push(Oscillator::new(
                omega_d * alpha.cos(),
                config.slot_duration_s,
                phi,
            ));
            quadrature.push(Oscillator::new(
                omega_d * alpha.sin(),
                config.slot_duration_s,
                psi,
            ));
        }
        UserChannel {
            doppler_hz,
            mean_gain: config.user_mean_gain(user),
            in_phase,
            quadrature,
            scale: (1.0 / m as f64).sqrt(),
        }
    }

    fn sample(&self) -> Coefficient {
        let re: f64 = self.in_phase.iter().map(|o| o.re).sum();
        let im: f64 = self.quadrature.iter().map(|o| o.re).sum();
        Coefficient {
            re: re * self.scale,
            im: im * self.scale,
        }
    }

    fn advance(&mut self, next_t: u64) {
        let resync = next_t.is_multiple_of(RESYNC_INTERVAL);
        for osc in self.in_phase.iter_mut().chain(self.quadrature.iter_mut()) {
            if resync {
                osc.resync(next_t);
            } else {
                osc.advance();
            }
        }
    }
}

/// Correlated fading process for all users of the cell.
#[derive(Debug, Clone)]
pub struct ChannelProcess {
    config: FadingConfig,
    users: Vec<UserChannel>,
    coefficients: Vec<Coefficient>,
    t: u64,
}

impl ChannelProcess {
    pub fn new(config: FadingConfig) -> Result<Self> {
        config.validate()?;
        let users = (0..config.n_users)
            .map(|n| UserChannel::new(&config, n))
            .collect();
        Ok(ChannelProcess {
            coefficients: vec![Coefficient::default(); config.n_users],
            config,
            users,
            t: 0,
        })
    }

    pub fn config(&self) -> &FadingConfig {
        &self.config
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// Index of the next slot to be sampled.
    pub fn slot(&self) -> u64 {
        self.t
    }

    pub fn doppler_hz(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.doppler_hz).collect()
    }

    /// Coefficients sampled by the most recent call to [`step`](Self::step).
    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coefficients
    }

    /// Samples `h_n(t)` for every user and advances to slot `t + 1`.
    pub fn step(&mut self) -> GainVector {
        let mut gains = vec![0.0; self.users.len()];
        self.step_into(&mut gains);
        GainVector(gains)
    }

    /// Like [`step`](Self::step) but writes into a caller-owned buffer.
    pub fn step_into(&mut self, gains: &mut [f64]) {
        assert_eq!(gains.len(), self.users.len(), "gain buffer length");
        let next_t = self.t + 1;
        for ((user, coef), gain) in self
            .users
            .iter_mut()
            .zip(self.coefficients.iter_mut())
            .zip(gains.iter_mut())
        {
            *coef = user.sample();
            *gain = user.mean_gain * coef.power();
            user.advance(next_t);
        }
        self.t = next_t;
    }
}

/// Anything that yields one gain vector per slot.
pub trait GainSource {
    fn n_users(&self) -> usize;

    /// Fills `gains` with the next slot's gains; `false` once exhausted.
    fn next_gains(&mut self, gains: &mut [f64]) -> bool;
}

impl GainSource for ChannelProcess {
    fn n_users(&self) -> usize {
        self.users.len()
    }

    fn next_gains(&mut self, gains: &mut [f64]) -> bool {
        self.step_into(gains);
        true
    }
}

/// A recorded channel realization, one row per slot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelTrace {
    n_users: usize,
    rows: Vec<Vec<f64>>,
}

impl ChannelTrace {
    pub fn new(n_users: usize) -> Self {
        ChannelTrace {
            n_users,
            rows: Vec::new(),
        }
    }

    pub fn record(process: &mut ChannelProcess, slots: usize) -> Self {
        let mut trace = ChannelTrace::new(process.n_users());
        for _ in 0..slots {
            trace.rows.push(process.step().into_inner());
        }
        trace
    }

    pub fn push(&mut self, gains: GainVector) -> Result<()> {
        if gains.len() != self.n_users {
            return Err(Error::Domain(format!(
                "trace has {} users, row has {}",
                self.n_users,
                gains.len()
            )));
        }
        self.rows.push(gains.into_inner());
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Writes `t,h_1,...,h_N` rows in exact scientific notation.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n_users).map(|n| format!("h_{n}")));
        w.write_record(&header)?;
        for (t, row) in self.rows.iter().enumerate() {
            let mut rec = Vec::with_capacity(row.len() + 1);
            rec.push(t.to_string());
            rec.extend(row.iter().map(|h| format!("{h:.16e}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::Domain(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.get(0) != Some("t") {
            return Err(Error::Domain("trace header must start with `t`".into()));
        }
        let n_users = headers.len() - 1;
        let mut trace = ChannelTrace::new(n_users);
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let t: usize = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("row {}: bad slot index", i + 1)))?;
            if t != i {
                return Err(Error::Domain(format!(
                    "row {}: expected slot {i}, found {t}",
                    i + 1
                )));
            }
            let gains = rec
                .iter()
                .skip(1)
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Domain(format!("row {}: {e}", i + 1)))?;
            trace.push(GainVector::new(gains)?)?;
        }
        Ok(trace)
    }

    pub fn replay(&self) -> TraceReplay<'_> {
        TraceReplay {
            trace: self,
            next: 0,
        }
    }
}

/// Replays a [`ChannelTrace`] slot by slot.
#[derive(Debug)]
pub struct TraceReplay<'a> {
    trace: &'a ChannelTrace,
    next: usize,
}

impl GainSource for TraceReplay<'_> {
    fn n_users(&self) -> usize {
        self.trace.n_users
    }

    fn next_gains(&mut self, gains: &mut [f64]) -> bool {
        match self.trace.rows.get(self.next) {
            Some(row) => {
                gains.copy_from_slice(row);
                self.next += 1;
                true
            }
            None => false,
        }
    }
}
