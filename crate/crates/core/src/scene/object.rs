use crate::geometry::{apply_motion, GeometryError};
use crate::scene::{Action, NodeId, ObjectId};
use crate::{Motiond, Posed};

/// One shared object: a pose known at some instant plus the action that has
/// been transforming it since.
///
/// The stored pose is only guaranteed valid at `pose_time`; poses at other
/// instants are produced on demand by closed-form extrapolation, so queries
/// at arbitrary times never accumulate integration error.
#[derive(Debug, Clone)]
pub struct SceneObject {
    pub id: ObjectId,
    pose: Posed,
    /// Instant the stored pose was last materialized, seconds.
    pose_time: f64,
    active_action: Option<Action>,
    lock_holder: Option<NodeId>,
}

impl SceneObject {
    pub fn new(id: ObjectId, pose: Posed, now: f64) -> Self {
        Self {
            id,
            pose,
            pose_time: now,
            active_action: None,
            lock_holder: None,
        }
    }

    pub fn pose(&self) -> Posed {
        self.pose
    }

    pub fn pose_time(&self) -> f64 {
        self.pose_time
    }

    pub fn active_action(&self) -> Option<&Action> {
        self.active_action.as_ref()
    }

    pub fn lock_holder(&self) -> Option<NodeId> {
        self.lock_holder
    }

    pub(crate) fn set_lock_holder(&mut self, holder: Option<NodeId>) {
        self.lock_holder = holder;
    }

    /// Motion currently driving the object; a hold if no action is active.
    pub fn current_motion(&self) -> Motiond {
        self.active_action
            .as_ref()
            .map(|a| a.motion)
            .unwrap_or_else(Motiond::hold)
    }

    /// Pose at time `t`, extrapolated from the stored pose under the active
    /// motion. `t` may not precede the stored pose's timestamp.
    pub fn pose_at(&self, t: f64) -> Result<Posed, GeometryError> {
        let dt = t - self.pose_time;
        apply_motion(&self.pose, &self.current_motion(), dt)
    }

    /// Advance the stored pose to time `t` and make `t` the new reference
    /// instant.
    pub fn materialize(&mut self, t: f64) -> Result<(), GeometryError> {
        self.pose = self.pose_at(t)?;
        self.pose_time = t;
        Ok(())
    }

    /// Push the stored pose forward by `dt` seconds of the active motion
    /// without moving the reference instant. Used to absorb a measured
    /// transport delay: the object is placed where it should already be.
    pub fn nudge_forward(&mut self, dt: f64) -> Result<(), GeometryError> {
        self.pose = apply_motion(&self.pose, &self.current_motion(), dt)?;
        Ok(())
    }

    /// Overwrite pose, reference instant, and active action in one step.
    /// Used when installing authoritative state received from the server.
    pub fn set_state(&mut self, pose: Posed, pose_time: f64, action: Option<Action>) {
        self.pose = pose;
        self.pose_time = pose_time;
        self.active_action = action;
    }

    /// Begin `action`, closing the previous action's duration retroactively.
    /// The caller must have already materialized the pose at the action's
    /// start time.
    pub(crate) fn install_action(&mut self, action: Action) -> Option<Action> {
        let mut previous = self.active_action.take();
        if let Some(prev) = previous.as_mut() {
            prev.duration = Some(action.start_time - prev.start_time);
        }
        self.active_action = Some(action);
        previous
    }
}
