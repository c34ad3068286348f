use super::pose::Pose;
use super::quaternion::Quaternion;
use super::scalar::Real;
use super::vec3::Vec3;
use super::GeometryError;

/// Whether a motion spins the object or moves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    Rotation,
    Translation,
}

/// Constant-velocity motion: a unit direction (rotation axis or travel
/// direction, world frame) and a non-negative speed.
///
/// Rotation speed is degrees per second; translation speed is length units
/// per second. Reversing a motion flips the direction vector, never the
/// speed. A zero speed means "hold still" and is the resting state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion<T> {
    pub kind: MotionKind,
    pub direction: Vec3<T>,
    pub velocity: T,
}

impl<T: Real> Motion<T> {
    fn validated(kind: MotionKind, direction: Vec3<T>, velocity: T) -> Result<Self, GeometryError> {
        if !direction.is_finite() {
            return Err(GeometryError::NonFinite { what: "direction" });
        }
        if !velocity.is_finite() {
            return Err(GeometryError::NonFinite { what: "velocity" });
        }
        if velocity < T::zero() {
            return Err(GeometryError::NegativeVelocity {
                velocity: velocity.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !direction.is_unit() {
            return Err(GeometryError::NonUnitAxis {
                norm: direction.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            kind,
            direction,
            velocity,
        })
    }

    /// Spin about `axis` at `deg_per_s` degrees per second.
    pub fn rotation(axis: Vec3<T>, deg_per_s: T) -> Result<Self, GeometryError> {
        Self::validated(MotionKind::Rotation, axis, deg_per_s)
    }

    /// Travel along `direction` at `units_per_s`.
    pub fn translation(direction: Vec3<T>, units_per_s: T) -> Result<Self, GeometryError> {
        Self::validated(MotionKind::Translation, direction, units_per_s)
    }

    /// The resting motion: zero angular velocity.
    pub fn hold() -> Self {
        Self {
            kind: MotionKind::Rotation,
            direction: Vec3::unit_z(),
            velocity: T::zero(),
        }
    }

    pub fn is_hold(&self) -> bool {
        self.velocity == T::zero()
    }
}

/// Extrapolates `pose` forward by `dt` seconds under `motion`.
///
/// `dt` must be finite and non-negative; extrapolation only runs forward.
/// Splitting an interval into pieces agrees with one big step to within
/// rounding: `apply(apply(p, m, a), m, b) == apply(p, m, a+b)` up to 1e-9.
pub fn apply_motion<T: Real>(
    pose: &Pose<T>,
    motion: &Motion<T>,
    dt: T,
) -> Result<Pose<T>, GeometryError> {
    if !dt.is_finite() {
        return Err(GeometryError::NonFinite { what: "dt" });
    }
    if dt < T::zero() {
        return Err(GeometryError::NegativeTimeStep {
            dt: dt.to_f64().unwrap_or(f64::NAN),
        });
    }
    if motion.is_hold() || dt == T::zero() {
        return Ok(*pose);
    }
    match motion.kind {
        MotionKind::Rotation => {
            let step = Quaternion::from_axis_angle(motion.direction, motion.velocity * dt)?;
            Ok(Pose::new(pose.position, step * pose.orientation))
        }
        MotionKind::Translation => Ok(Pose::new(
            pose.position + motion.direction.scaled(motion.velocity * dt),
            pose.orientation,
        )),
    }
}
