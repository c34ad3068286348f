use super::quaternion::Quaternion;
use super::scalar::Real;
use super::vec3::Vec3;

/// Rigid pose: position plus orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    pub position: Vec3<T>,
    pub orientation: Quaternion<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(position: Vec3<T>, orientation: Quaternion<T>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    /// Origin with no rotation.
    pub fn identity() -> Self {
        Self {
            position: Vec3::zero(),
            orientation: Quaternion::identity(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pose() {
        let p = Pose::<f64>::identity();
        assert_eq!(p.position, Vec3::zero());
        assert_eq!(p.orientation, Quaternion::identity());
    }
}
