//! Scenario harness for the scene synchronization engine: scripted rotation
//! runs over the simulated network, drift sampling at action initiations,
//! CSV/summary reporting, the scalability metric, and a probe-rate demo.

use thiserror::Error;

pub mod config;
pub mod psi;
pub mod report;
pub mod scenario;
pub mod schedule;

pub use config::ScenarioConfig;
pub use psi::{scalability, Scalability, ScalabilityReport};
pub use report::{DriftSample, ProbePoint};
pub use scenario::{classify, probe_demo, run_scenario, ProbeDemoOutcome, ScenarioOutcome};
pub use schedule::{build_rotation_schedule, ScheduledAction};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {what}")]
    Config { line: usize, what: String },
    #[error("invalid scenario: {what}")]
    Validation { what: String },
    #[error("csv line {line}: {what}")]
    BadCsv { line: usize, what: String },
    #[error(transparent)]
    Sim(#[from] scenesync_core::net::SimError),
    #[error(transparent)]
    Runtime(#[from] scenesync_core::runtime::RuntimeError),
    #[error(transparent)]
    Scene(#[from] scenesync_core::scene::SceneError),
    #[error(transparent)]
    Geometry(#[from] scenesync_core::geometry::GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
