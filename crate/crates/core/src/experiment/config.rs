use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::FadingConfig;
use crate::phy::PhyParams;
use crate::sched::Policy;
use crate::sim::{SimConfig, StabilityThresholds, TrafficConfig};

/// Uniform load spread evenly over all users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficTemplate {
    pub total_load_pkts: f64,
    pub batch_size_pkts: u32,
    pub packet_bits: u64,
}

impl Default for TrafficTemplate {
    fn default() -> Self {
        TrafficTemplate {
            total_load_pkts: 28.0,
            batch_size_pkts: 4,
            packet_bits: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Total offered load in packets per slot.
    ArrivalTotal(Vec<f64>),
    /// Transmit power budget in Watts.
    PowerW(Vec<f64>),
}

impl SweepAxis {
    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::ArrivalTotal(v) | SweepAxis::PowerW(v) => v,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::ArrivalTotal(_) => "arrival_total",
            SweepAxis::PowerW(_) => "power_w",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Load at which the uniform Max-Weight policy should sit on the edge of stability.
    pub anchor_load_pkts: f64,
    /// Normalized slope aimed for at the anchor; defaults to the midpoint of
    /// the stable and unstable thresholds.
    pub target_slope: Option<f64>,
    pub gain_bounds: [f64; 2],
    pub iterations: u32,
    /// Defaults to the experiment's horizon and warmup.
    pub horizon_slots: Option<u64>,
    pub seeds: Vec<u64>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            anchor_load_pkts: 30.0,
            target_slope: None,
            gain_bounds: [1e-4, 1e-2],
            iterations: 12,
            horizon_slots: None,
            seeds: vec![101, 102, 103],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub phy: PhyParams,
    /// `master_seed` is ignored; each run uses its own seed.
    pub fading: FadingConfig,
    pub traffic: TrafficTemplate,
    pub policies: Vec<Policy>,
    pub sweep: Option<SweepAxis>,
    pub horizon_slots: u64,
    /// Defaults to a tenth of the horizon.
    pub warmup_slots: Option<u64>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub series_every: u64,
    pub stability: StabilityThresholds,
    pub calibration: CalibrationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: "default".into(),
            phy: PhyParams::default(),
            fading: FadingConfig {
                gain_spread_db: 10.0,
                ..FadingConfig::default()
            },
            traffic: TrafficTemplate::default(),
            policies: vec![Policy::Mwum, Policy::Mwdm, Policy::Lmwdm],
            sweep: None,
            horizon_slots: 200_000,
            warmup_slots: None,
            seeds: vec![1, 2, 3],
            out_dir: PathBuf::from("out"),
            series_every: 100,
            stability: StabilityThresholds::default(),
            calibration: CalibrationConfig::default(),
        }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    /// Reads a TOML file and applies `key.path=value` overrides.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, overrides).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Partial tables inherit the experiment defaults, not the defaults of
    /// the nested types.
    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let user: toml::Table = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })?;
        let mut table =
            toml::Table::try_from(ExperimentConfig::default()).expect("defaults serialize");
        merge(&mut table, user);
        for (key, value) in overrides {
            set_path(&mut table, key, parse_scalar(value))?;
        }
        let cfg: ExperimentConfig =
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| Error::Parse {
                    path: PathBuf::from("<config>"),
                    message: e.to_string(),
                })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn warmup(&self) -> u64 {
        self.warmup_slots.unwrap_or(self.horizon_slots / 10)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "must not be empty"));
        }
        if let Some(axis) = &self.sweep {
            let v = axis.values();
            let field = format!("sweep.{}", axis.name());
            if v.is_empty() {
                return Err(Error::config(field, "must not be empty"));
            }
            if !strictly_increasing(v) {
                return Err(Error::config(field, "must be strictly increasing"));
            }
        }
        if self.traffic.total_load_pkts.is_nan() || self.traffic.total_load_pkts < 0.0 {
            return Err(Error::config(
                "traffic.total_load_pkts",
                "must be nonnegative",
            ));
        }
        let c = &self.calibration;
        if !(c.gain_bounds[0] > 0.0 && c.gain_bounds[0] < c.gain_bounds[1]) {
            return Err(Error::config(
                "calibration.gain_bounds",
                "need 0 < lower < upper",
            ));
        }
        if c.seeds.is_empty() {
            return Err(Error::config("calibration.seeds", "must not be empty"));
        }
        // every concrete run this config can produce must be valid
        let probe_load = match &self.sweep {
            Some(SweepAxis::ArrivalTotal(v)) => v.iter().cloned().fold(0.0, f64::max),
            _ => self.traffic.total_load_pkts,
        };
        for &policy in &self.policies {
            self.sim_config(policy, self.seeds[0], probe_load, self.phy.total_power_w)
                .validate()?;
        }
        if let Some(SweepAxis::PowerW(v)) = &self.sweep {
            for &p in v {
                self.phy.with_power(p).validate()?;
            }
        }
        Ok(())
    }

    /// Concrete run at the given load and power.
    pub fn sim_config(
        &self,
        policy: Policy,
        seed: u64,
        total_load_pkts: f64,
        power_w: f64,
    ) -> SimConfig {
        let n = self.fading.n_users;
        SimConfig {
            fading: FadingConfig {
                master_seed: seed,
                ..self.fading.clone()
            },
            traffic: TrafficConfig {
                per_user_mean_pkts: vec![total_load_pkts / n as f64; n],
                batch_size_pkts: self.traffic.batch_size_pkts,
                packet_bits: self.traffic.packet_bits,
            },
            phy: self.phy.with_power(power_w),
            policy,
            horizon_slots: self.horizon_slots,
            warmup_slots: self.warmup(),
            seed,
            stability: self.stability,
            series_every: self.series_every,
        }
    }
}

fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Interprets an override value as a TOML literal, falling back to a bare string.
fn parse_scalar(value: &str) -> toml::Value {
    let doc = format!("v = {value}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(value.into())),
        Err(_) => toml::Value::String(value.into()),
    }
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::config(key, "empty override key"))?;
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ExperimentConfig::from_toml_str("", &[]).unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.warmup(), 20_000);
    }

    #[test]
    fn defaults_roundtrip_through_toml() {
        let c = ExperimentConfig {
            sweep: Some(SweepAxis::PowerW(vec![1.0, 2.0])),
            ..ExperimentConfig::default()
        };
        let text = c.to_toml_string();
        assert_eq!(ExperimentConfig::from_toml_str(&text, &[]).unwrap(), c);
    }

    #[test]
    fn overrides_follow_field_paths() {
        let o = vec![
            ("phy.total_power_w".to_string(), "5".to_string()),
            ("fading.n_users".to_string(), "4".to_string()),
            ("scenario".to_string(), "tiny".to_string()),
            ("sweep.arrival_total".to_string(), "[1.0, 2.0]".to_string()),
        ];
        let c = ExperimentConfig::from_toml_str("", &o).unwrap();
        assert_eq!(c.phy.total_power_w, 5.0);
        assert_eq!(c.fading.n_users, 4);
        assert_eq!(c.scenario, "tiny");
        assert_eq!(c.sweep, Some(SweepAxis::ArrivalTotal(vec![1.0, 2.0])));
    }

    #[test]
    fn partial_tables_keep_experiment_defaults() {
        let c = ExperimentConfig::from_toml_str("[fading]\nmean_gain = 2e-3\n", &[]).unwrap();
        assert_eq!(c.fading.mean_gain, 2e-3);
        assert_eq!(
            c.fading.gain_spread_db,
            ExperimentConfig::default().fading.gain_spread_db
        );
        let o = vec![("fading.n_users".to_string(), "10".to_string())];
        let c = ExperimentConfig::from_toml_str("", &o).unwrap();
        assert_eq!(c.fading.gain_spread_db, 10.0);
        let c =
            ExperimentConfig::from_toml_str("[phy]\nrate_cap = { bits = 100.0 }\n", &[]).unwrap();
        assert_eq!(c.phy.rate_cap, crate::phy::RateCap::Bits(100.0));
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = ExperimentConfig::from_toml_str("seeds = [1,\nhorizon_slots = = 3\n", &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_toml_str("bogus = 1\n", &[]).is_err());
        assert!(ExperimentConfig::from_toml_str("[phy]\npower = 1\n", &[]).is_err());
    }

    #[test]
    fn validation_names_field() {
        let cases = [
            ("seeds = []", "seeds"),
            ("[sweep]\narrival_total = [3.0, 2.0]", "sweep.arrival_total"),
            ("[sweep]\npower_w = []", "sweep.power_w"),
            ("[phy]\nnoise_power_w = 0.0", "phy.noise_power_w"),
            (
                "[traffic]\ntotal_load_pkts = 200.0",
                "traffic.per_user_mean_pkts",
            ),
            ("horizon_slots = 100\nwarmup_slots = 80", "horizon_slots"),
        ];
        for (text, field) in cases {
            match ExperimentConfig::from_toml_str(text, &[]) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn sim_config_matches_template() {
        let c = ExperimentConfig::default();
        let s = c.sim_config(Policy::Mwdm, 9, 30.0, 4.0);
        assert_eq!(s.seed, 9);
        assert_eq!(s.fading.master_seed, 9);
        assert_eq!(s.phy.total_power_w, 4.0);
        assert!((s.traffic.total_pkts_per_slot() - 30.0).abs() < 1e-12);
        s.validate().unwrap();
    }

    #[test]
    fn missing_file_names_path() {
        let err = ExperimentConfig::load(Path::new("/nonexistent/exp.toml"), &[]).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/exp.toml"));
    }
}
