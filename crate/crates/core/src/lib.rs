//! Downlink Max-Weight scheduling with two-layer hierarchical modulation.
//!
//! The crate is organized bottom-up:
//!
//! * [`fading`]: per-user correlated Rayleigh gains (sum of sinusoids).
//! * [`phy`]: uniform and layered rates, and the exact two-user power split.
//! * [`sched`]: MWUM, MWHM, MWDM and L-MWDM decisions.
//! * [`sim`]: arrivals, queue dynamics, stability and delay metrics.
//! * [`experiment`]: configuration files, sweeps, calibration and reports.

pub mod error;
pub mod experiment;
pub mod fading;
pub mod phy;
pub mod rng;
pub mod sched;
pub mod sim;

pub use error::{Error, Result};
pub use fading::{ChannelProcess, FadingConfig, GainVector};
pub use phy::{GridSpacing, PairWeightResult, PhyParams, PowerSplit, RateCap};
pub use sched::{Modulation, Policy, ScheduleDecision, Served};
pub use sim::{SimConfig, SimReport, Verdict};
