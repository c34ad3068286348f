use crate::geometry::GeometryError;
use crate::Motiond;
use core::fmt;

/// Identifier of a scene object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub u32);

/// Identifier of a participating node (server or client).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Sequence number of an action; increases monotonically per scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "obj{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A named constant-velocity transform applied to one object.
///
/// An action starts at a known instant; its duration is unknown while it is
/// the newest action and is closed retroactively when the next action on the
/// same object begins. Acceleration is always zero: between actions, objects
/// move with exactly the recorded velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub id: ActionId,
    /// Short human label, e.g. "spin-x". Not transmitted on the wire.
    pub name: String,
    pub motion: Motiond,
    /// Scene time at which the action began, seconds.
    pub start_time: f64,
    /// Filled in when the next action begins; `None` while current.
    pub duration: Option<f64>,
}

impl Action {
    pub fn new(
        id: ActionId,
        name: impl Into<String>,
        motion: Motiond,
        start_time: f64,
    ) -> Result<Self, GeometryError> {
        if !start_time.is_finite() {
            return Err(GeometryError::NonFinite { what: "start_time" });
        }
        Ok(Self {
            id,
            name: name.into(),
            motion,
            start_time,
            duration: None,
        })
    }
}
