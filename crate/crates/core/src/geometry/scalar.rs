use core::fmt;
use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the geometry types are generic over.
///
/// Implemented for `f32` and `f64`. The associated tolerance scales with the
/// precision of the type and bounds how far a "unit" quaternion or axis may
/// stray from length one before constructors reject it.
pub trait Real:
    Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Copy + 'static
{
    /// Largest accepted deviation of a unit axis / quaternion norm from 1.
    const UNIT_TOL: Self;

    /// Shorthand for converting an `f64` constant into this scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {
    const UNIT_TOL: f32 = 1e-4;
}

impl Real for f64 {
    const UNIT_TOL: f64 = 1e-9;
}

/// Converts degrees to radians.
pub fn deg_to_rad<T: Real>(deg: T) -> T {
    deg * T::PI() / T::lit(180.0)
}

/// Converts radians to degrees.
pub fn rad_to_deg<T: Real>(rad: T) -> T {
    rad * T::lit(180.0) / T::PI()
}
