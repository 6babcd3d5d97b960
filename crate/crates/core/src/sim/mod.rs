//! Slot-level queueing simulation.

mod queue;
mod run;
mod stability;
mod traffic;

pub use queue::QueueState;
pub use run::{run, SeriesPoint, SimConfig, SimReport, Simulation, SlotOutcome};
pub use stability::{
    littles_delay, stability_verdict, StabilityAssessment, StabilityThresholds, StabilityTracker,
    Verdict,
};
pub use traffic::{ArrivalProcess, TrafficConfig};
