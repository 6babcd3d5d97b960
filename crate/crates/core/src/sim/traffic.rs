use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, Domain};

/// Batch-Bernoulli arrivals: each slot user `n` receives `K` packets with
/// probability `lambda_n / K`, otherwise nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    /// Mean packets per slot for each user.
    pub per_user_mean_pkts: Vec<f64>,
    #[serde(default = "default_batch")]
    pub batch_size_pkts: u32,
    #[serde(default = "default_packet_bits")]
    pub packet_bits: u64,
}

fn default_batch() -> u32 {
    4
}

fn default_packet_bits() -> u64 {
    1024
}

impl TrafficConfig {
    /// Splits `total_pkts_per_slot` evenly over `n_users`.
    pub fn uniform(n_users: usize, total_pkts_per_slot: f64) -> Self {
        TrafficConfig {
            per_user_mean_pkts: vec![total_pkts_per_slot / n_users as f64; n_users],
            batch_size_pkts: default_batch(),
            packet_bits: default_packet_bits(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size_pkts == 0 {
            return Err(Error::config("traffic.batch_size_pkts", "must be positive"));
        }
        if self.packet_bits == 0 {
            return Err(Error::config("traffic.packet_bits", "must be positive"));
        }
        let k = self.batch_size_pkts as f64;
        for (n, &l) in self.per_user_mean_pkts.iter().enumerate() {
            if !(0.0..=k).contains(&l) {
                return Err(Error::config(
                    "traffic.per_user_mean_pkts",
                    format!("user {n}: mean {l} outside [0, {k}]"),
                ));
            }
        }
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.per_user_mean_pkts.len()
    }

    pub fn total_pkts_per_slot(&self) -> f64 {
        self.per_user_mean_pkts.iter().sum()
    }

    pub fn total_bits_per_slot(&self) -> f64 {
        self.total_pkts_per_slot() * self.packet_bits as f64
    }

    /// `a_max` in bits per slot per user.
    pub fn batch_bits(&self) -> u64 {
        self.batch_size_pkts as u64 * self.packet_bits
    }
}

/// Per-user arrival streams. Every user consumes exactly one uniform draw per
/// slot, so traces stay coupled across loads and policies.
#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    probs: Vec<f64>,
    batch_bits: u64,
    streams: Vec<ChaCha8Rng>,
}

impl ArrivalProcess {
    pub fn new(traffic: &TrafficConfig, seed: u64) -> Result<Self> {
        traffic.validate()?;
        let k = traffic.batch_size_pkts as f64;
        Ok(ArrivalProcess {
            probs: traffic.per_user_mean_pkts.iter().map(|l| l / k).collect(),
            batch_bits: traffic.batch_bits(),
            streams: (0..traffic.n_users())
                .map(|n| substream(seed, Domain::Arrivals, n as u64))
                .collect(),
        })
    }

    /// Bits arriving to each user this slot.
    pub fn next_into(&mut self, out: &mut [u64]) {
        for ((rng, &p), a) in self.streams.iter_mut().zip(&self.probs).zip(out.iter_mut()) {
            let u: f64 = rng.gen();
            *a = if u < p { self.batch_bits } else { 0 };
        }
    }

    pub fn next_slot(&mut self) -> Vec<u64> {
        let mut out = vec![0; self.streams.len()];
        self.next_into(&mut out);
        out
    }
}
