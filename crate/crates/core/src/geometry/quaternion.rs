use super::scalar::{deg_to_rad, rad_to_deg, Real};
use super::vec3::Vec3;
use super::GeometryError;
use core::ops::Mul;

/// Unit quaternion representing an orientation, scalar-first (w, x, y, z).
///
/// Products use the Hamilton convention and are renormalized, so a chain of
/// thousands of incremental rotations stays on the unit sphere. Composition
/// order matches rotation matrices: `(a * b)` rotates by `b` first, then `a`,
/// about world-frame axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    /// The no-rotation orientation.
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    /// Rotation of `angle_deg` degrees about the unit vector `axis`
    /// (right-handed, world frame).
    ///
    /// Rejects axes whose length differs from one by more than
    /// [`Real::UNIT_TOL`] and non-finite inputs.
    pub fn from_axis_angle(axis: Vec3<T>, angle_deg: T) -> Result<Self, GeometryError> {
        if !axis.is_finite() {
            return Err(GeometryError::NonFinite { what: "axis" });
        }
        if !angle_deg.is_finite() {
            return Err(GeometryError::NonFinite { what: "angle" });
        }
        if !axis.is_unit() {
            return Err(GeometryError::NonUnitAxis {
                norm: axis.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        let half = deg_to_rad(angle_deg) / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Ok(Self {
            w: c,
            x: axis.x * s,
            y: axis.y * s,
            z: axis.z * s,
        })
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Same rotation, length forced back to exactly one.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Inverse rotation. Orientations are unit length, so this is the
    /// (renormalized) conjugate.
    pub fn inverse(&self) -> Self {
        self.conjugate().normalized()
    }

    /// Length of the vector (imaginary) part.
    fn vector_norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// The equivalent 3x3 rotation matrix (row-major).
    pub fn rotation_matrix(&self) -> [[T; 3]; 3] {
        let Self { w, x, y, z } = *self;
        let two = T::lit(2.0);
        let one = T::one();
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;

    /// Hamilton product, renormalized.
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self {
            w: p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            x: p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            y: p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            z: p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        }
        .normalized()
    }
}

/// Angular separation between two orientations, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DriftAngle<T>(T);

impl<T: Real> DriftAngle<T> {
    pub fn degrees(&self) -> T {
        self.0
    }
}

/// The rotation that takes the replica orientation `replica` onto the
/// authoritative orientation `live`: multiplying the result by `replica`
/// reproduces `live`.
pub fn drift_correction<T: Real>(live: Quaternion<T>, replica: Quaternion<T>) -> Quaternion<T> {
    live * replica.inverse()
}

/// Drift angle between an authoritative orientation and a replica, degrees
/// in [0, 180].
///
/// A quaternion and its negation describe the same orientation, so the
/// separation quaternion's scalar part is canonicalized to be non-negative
/// before the angle is extracted; identical or antipodal inputs both yield 0.
/// The angle is evaluated as `2*atan2(|vec|, w)`, which equals `2*acos(w)`
/// for unit inputs but stays accurate below a microdegree.
pub fn drift_angle<T: Real>(live: Quaternion<T>, replica: Quaternion<T>) -> DriftAngle<T> {
    let mut e = drift_correction(live, replica);
    if e.w < T::zero() {
        e = Quaternion::new(-e.w, -e.x, -e.y, -e.z);
    }
    let w = if e.w > T::one() { T::one() } else { e.w };
    let half = e.vector_norm().atan2(w);
    DriftAngle(rad_to_deg(half * T::lit(2.0)))
}
