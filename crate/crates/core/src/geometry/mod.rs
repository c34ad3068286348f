//! Scalar-generic geometry: 3-vectors, unit quaternions, rigid poses, and
//! constant-velocity motions, plus the drift angle between two orientations.
//!
//! Angles are degrees at every public boundary. Rotation axes and translation
//! directions are world-frame unit vectors.

mod motion;
mod pose;
mod quaternion;
mod scalar;
mod vec3;

pub use motion::{apply_motion, Motion, MotionKind};
pub use pose::Pose;
pub use quaternion::{drift_angle, drift_correction, DriftAngle, Quaternion};
pub use scalar::{deg_to_rad, rad_to_deg, Real};
pub use vec3::Vec3;

use thiserror::Error;

/// Validation failures for geometric inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A rotation axis or translation direction was not unit length.
    #[error("direction is not unit length (norm {norm})")]
    NonUnitAxis { norm: f64 },
    /// A time step was negative where only forward extrapolation is defined.
    #[error("negative time step {dt}")]
    NegativeTimeStep { dt: f64 },
    /// A speed was negative; direction of travel is carried by the axis sign.
    #[error("negative velocity {velocity}")]
    NegativeVelocity { velocity: f64 },
    /// An input contained NaN or infinity.
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },
}
