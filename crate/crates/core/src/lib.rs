//! Engine for keeping a dynamic shared 3D scene consistent across networked
//! nodes. One node acts as the authoritative server; replicas apply incoming
//! control packets and compensate the measured one-way delay so that a moving
//! object's pose matches the server's despite network latency and jitter.
//!
//! Module map:
//!
//! * [`geometry`]: vectors, unit quaternions, poses, constant-velocity
//!   motions, and the orientation-drift angle. Generic over the scalar type.
//! * [`scene`]: scene objects, actions, ownership locks, control packets,
//!   and action-rate classification.
//! * [`sync`]: drift values/vectors/matrices, delay-compensated pose
//!   correction, delay history statistics, and the adaptive probe rate.
//! * [`net`]: binary wire codec, jittered link models, a deterministic
//!   discrete-event simulator, and a UDP loopback transport.
//! * [`runtime`]: server and client node state machines driving the above,
//!   usable over either transport.

pub mod geometry;
pub mod net;
pub mod runtime;
pub mod scene;
pub mod seedstream;
pub mod sync;

/// Double-precision 3-vector used by the engine.
pub type Vec3d = geometry::Vec3<f64>;
/// Single-precision 3-vector.
pub type Vec3f = geometry::Vec3<f32>;
/// Double-precision orientation quaternion used by the engine.
pub type Quaterniond = geometry::Quaternion<f64>;
/// Single-precision orientation quaternion.
pub type Quaternionf = geometry::Quaternion<f32>;
/// Double-precision rigid pose used by the engine.
pub type Posed = geometry::Pose<f64>;
/// Single-precision rigid pose.
pub type Posef = geometry::Pose<f32>;
/// Double-precision constant-velocity motion used by the engine.
pub type Motiond = geometry::Motion<f64>;
/// Single-precision constant-velocity motion.
pub type Motionf = geometry::Motion<f32>;
