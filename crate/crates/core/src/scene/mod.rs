//! Shared-scene state: objects, the actions that transform them, edit locks,
//! and the per-node action-rate bookkeeping.

mod action;
mod frequency;
mod object;

pub use action::{Action, ActionId, NodeId, ObjectId};
pub use frequency::{
    action_frequency, all_rates, classify_tempo, upshot_frequency, ActionTrace, FrequencyReport,
    Tempo, TraceEntry,
};
pub use object::SceneObject;

use crate::geometry::{GeometryError, Motion, MotionKind};
use crate::{Motiond, Posed, Vec3d};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("object {0} already exists")]
    DuplicateObject(ObjectId),
    #[error("lock on {object} is held by {holder}")]
    LockHeld { object: ObjectId, holder: NodeId },
    #[error("{requester} does not hold the lock on {object}")]
    NotLockHolder {
        object: ObjectId,
        requester: NodeId,
    },
    #[error("invalid observation window: {what}")]
    BadWindow { what: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Wire-friendly description of an action: enough for any replica to
/// reproduce the motion exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionDescriptor {
    pub id: ActionId,
    pub kind: MotionKind,
    pub direction: Vec3d,
    pub velocity: f64,
    pub start_time: f64,
}

impl ActionDescriptor {
    pub fn from_action(action: &Action) -> Self {
        Self {
            id: action.id,
            kind: action.motion.kind,
            direction: action.motion.direction,
            velocity: action.motion.velocity,
            start_time: action.start_time,
        }
    }

    /// Descriptor for an object that is not being transformed.
    pub fn hold(start_time: f64) -> Self {
        let m = Motiond::hold();
        Self {
            id: ActionId(0),
            kind: m.kind,
            direction: m.direction,
            velocity: m.velocity,
            start_time,
        }
    }

    pub fn motion(&self) -> Result<Motiond, GeometryError> {
        match self.kind {
            MotionKind::Rotation => Motion::rotation(self.direction, self.velocity),
            MotionKind::Translation => Motion::translation(self.direction, self.velocity),
        }
    }

    pub fn is_hold(&self) -> bool {
        self.velocity == 0.0
    }
}

/// Authoritative state update for one object: the pose it had at the stated
/// server time plus the action transforming it from that instant on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPacketObject {
    pub object_id: ObjectId,
    pub server_timestamp: f64,
    pub pose: Posed,
    pub action: ActionDescriptor,
}

/// The authoritative scene: all shared objects plus per-node action history.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    objects: BTreeMap<ObjectId, SceneObject>,
    trace: ActionTrace,
    next_action: u32,
}

impl Scene {
    pub fn new() -> Self {
        Self {
            objects: BTreeMap::new(),
            trace: ActionTrace::new(),
            next_action: 1,
        }
    }

    pub fn add_object(&mut self, id: ObjectId, pose: Posed, now: f64) -> Result<(), SceneError> {
        if self.objects.contains_key(&id) {
            return Err(SceneError::DuplicateObject(id));
        }
        self.objects.insert(id, SceneObject::new(id, pose, now));
        Ok(())
    }

    pub fn object(&self, id: ObjectId) -> Option<&SceneObject> {
        self.objects.get(&id)
    }

    pub fn object_mut(&mut self, id: ObjectId) -> Option<&mut SceneObject> {
        self.objects.get_mut(&id)
    }

    pub fn objects(&self) -> impl Iterator<Item = &SceneObject> {
        self.objects.values()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn trace(&self) -> &ActionTrace {
        &self.trace
    }

    /// Grant the edit lock to `node` if the object is free (or `node`
    /// already holds it); first come, first served, no queueing.
    pub fn acquire_lock(&mut self, object: ObjectId, node: NodeId) -> Result<(), SceneError> {
        let obj = self
            .objects
            .get_mut(&object)
            .ok_or(SceneError::UnknownObject(object))?;
        match obj.lock_holder() {
            None => {
                obj.set_lock_holder(Some(node));
                Ok(())
            }
            Some(holder) if holder == node => Ok(()),
            Some(holder) => Err(SceneError::LockHeld { object, holder }),
        }
    }

    pub fn release_lock(&mut self, object: ObjectId, node: NodeId) -> Result<(), SceneError> {
        let obj = self
            .objects
            .get_mut(&object)
            .ok_or(SceneError::UnknownObject(object))?;
        match obj.lock_holder() {
            Some(holder) if holder == node => {
                obj.set_lock_holder(None);
                Ok(())
            }
            _ => Err(SceneError::NotLockHolder {
                object,
                requester: node,
            }),
        }
    }

    /// Begin a new action on `object` at time `now`, initiated by `node`,
    /// which must hold the object's lock.
    ///
    /// The object's pose is materialized at `now` (closing the previous
    /// action with its retroactive duration), the initiation is recorded in
    /// the trace, and the state update to broadcast is returned.
    pub fn begin_action(
        &mut self,
        object: ObjectId,
        node: NodeId,
        name: impl Into<String>,
        motion: Motiond,
        now: f64,
    ) -> Result<ControlPacketObject, SceneError> {
        let obj = self
            .objects
            .get_mut(&object)
            .ok_or(SceneError::UnknownObject(object))?;
        match obj.lock_holder() {
            Some(holder) if holder == node => {}
            _ => {
                return Err(SceneError::NotLockHolder {
                    object,
                    requester: node,
                })
            }
        }
        obj.materialize(now)?;
        let id = ActionId(self.next_action);
        self.next_action += 1;
        let action = Action::new(id, name, motion, now)?;
        obj.install_action(action);
        self.trace.record(TraceEntry {
            action: id,
            object,
            node,
            time: now,
        });
        Ok(ControlPacketObject {
            object_id: object,
            server_timestamp: now,
            pose: obj.pose(),
            action: ActionDescriptor::from_action(obj.active_action().expect("just installed")),
        })
    }

    /// State updates describing every object as of time `now`, in object-id
    /// order. Objects without an active action are described as holding.
    pub fn snapshot(&self, now: f64) -> Result<Vec<ControlPacketObject>, SceneError> {
        let mut out = Vec::with_capacity(self.objects.len());
        for obj in self.objects.values() {
            let action = match obj.active_action() {
                Some(a) => ActionDescriptor::from_action(a),
                None => ActionDescriptor::hold(now),
            };
            out.push(ControlPacketObject {
                object_id: obj.id,
                server_timestamp: now,
                pose: obj.pose_at(now)?,
                action,
            });
        }
        Ok(out)
    }

    /// Advance every stored pose to time `now`.
    pub fn materialize_all(&mut self, now: f64) -> Result<(), SceneError> {
        for obj in self.objects.values_mut() {
            obj.materialize(now)?;
        }
        Ok(())
    }
}
