use serde::{Deserialize, Serialize};

/// Backlogs and cumulative counters, all in whole bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueState {
    pub backlog_bits: Vec<u64>,
    pub arrived_bits: Vec<u64>,
    pub departed_bits: Vec<u64>,
}

impl QueueState {
    pub fn new(n_users: usize) -> Self {
        QueueState {
            backlog_bits: vec![0; n_users],
            arrived_bits: vec![0; n_users],
            departed_bits: vec![0; n_users],
        }
    }

    pub fn n_users(&self) -> usize {
        self.backlog_bits.len()
    }

    pub fn total_bits(&self) -> u64 {
        self.backlog_bits.iter().sum()
    }

    pub fn backlog_f64(&self) -> Vec<f64> {
        self.backlog_bits.iter().map(|&b| b as f64).collect()
    }

    /// `q <- max(q + a - floor(mu), 0)` per user. Only bits actually present
    /// are counted as departures. Returns the bits removed from each queue.
    pub fn apply_service(&mut self, arrivals: &[u64], granted: &[f64]) -> Vec<u64> {
        assert_eq!(arrivals.len(), self.n_users());
        assert_eq!(granted.len(), self.n_users());
        let mut served = vec![0; self.n_users()];
        for n in 0..self.n_users() {
            let available = self.backlog_bits[n] + arrivals[n];
            let capacity = if granted[n] > 0.0 {
                granted[n].floor() as u64
            } else {
                0
            };
            let s = available.min(capacity);
            self.backlog_bits[n] = available - s;
            self.arrived_bits[n] += arrivals[n];
            self.departed_bits[n] += s;
            served[n] = s;
        }
        served
    }

    /// Backlog equals arrivals minus departures for every user.
    pub fn is_conserved(&self) -> bool {
        (0..self.n_users())
            .all(|n| self.backlog_bits[n] + self.departed_bits[n] == self.arrived_bits[n])
    }
}
