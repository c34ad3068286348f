//! Latency compensation: drift bookkeeping, delay estimation, adaptive
//! probe pacing, and the pose correction applied when a state update lands.

mod delay;
mod drift;

pub use delay::{rtt_to_delay, DelayHistory, ProbeRateConfig, RateDecision};
pub use drift::{drift_value, DriftMatrix, DriftVector};

use crate::geometry::{apply_motion, GeometryError};
use crate::scene::ControlPacketObject;
use crate::Posed;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SyncError {
    #[error("negative delay: {delay}")]
    NegativeDelay { delay: f64 },
    #[error("negative velocity: {velocity}")]
    NegativeVelocity { velocity: f64 },
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },
    #[error("probe rate configuration: {what}")]
    BadProbeConfig { what: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Pose a receiving node should install for a state update that spent
/// `estimated_delay` seconds in transit: the transmitted pose advanced by
/// the motion it describes, so the replica lands where the live object
/// already is instead of where it was at send time.
pub fn correct_pose(
    cpo: &ControlPacketObject,
    estimated_delay: f64,
) -> Result<Posed, SyncError> {
    if !estimated_delay.is_finite() {
        return Err(SyncError::NonFinite {
            what: "estimated delay",
        });
    }
    if estimated_delay < 0.0 {
        return Err(SyncError::NegativeDelay {
            delay: estimated_delay,
        });
    }
    let motion = cpo.action.motion()?;
    Ok(apply_motion(&cpo.pose, &motion, estimated_delay)?)
}
