use crate::net::Message;
use crate::runtime::{EventLog, LogKind, Outbound, RuntimeError};
use crate::scene::{ControlPacketObject, NodeId, ObjectId, Scene, SceneError};
use crate::{Motiond, Posed};
use std::collections::{BTreeMap, BTreeSet};

/// The authoritative node: owns the scene, arbitrates locks, answers joins
/// and delay probes, and broadcasts every action it applies.
pub struct ServerNode {
    id: NodeId,
    scene: Scene,
    clients: BTreeSet<NodeId>,
    log: EventLog,
}

impl ServerNode {
    pub fn new(id: NodeId) -> Self {
        Self {
            id,
            scene: Scene::new(),
            clients: BTreeSet::new(),
            log: EventLog::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn clients(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.clients.iter().copied()
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn add_object(&mut self, id: ObjectId, pose: Posed, now: f64) -> Result<(), RuntimeError> {
        Ok(self.scene.add_object(id, pose, now)?)
    }

    /// Speeds of every object's active action; objects at rest carry zero.
    pub fn velocity_vector(&self) -> BTreeMap<ObjectId, f64> {
        self.scene
            .objects()
            .map(|o| {
                let v = o.active_action().map(|a| a.motion.velocity).unwrap_or(0.0);
                (o.id, v)
            })
            .collect()
    }

    /// Apply one inbound message, producing any replies.
    pub fn handle_message(
        &mut self,
        from: NodeId,
        msg: Message,
        now: f64,
    ) -> Result<Vec<Outbound>, RuntimeError> {
        match msg {
            Message::Join => {
                self.clients.insert(from);
                self.log.push(now, LogKind::ClientJoined { client: from });
                let objects = self.scene.snapshot(now)?;
                Ok(vec![Outbound {
                    to: from,
                    message: Message::JoinAck { objects },
                }])
            }
            Message::ProbePing {
                probe_id,
                origin_time,
            } => Ok(vec![Outbound {
                to: from,
                message: Message::ProbePong {
                    probe_id,
                    origin_time,
                },
            }]),
            Message::LockRequest { object } => match self.scene.acquire_lock(object, from) {
                Ok(()) => {
                    self.log.push(now, LogKind::LockGranted { object, to: from });
                    Ok(vec![Outbound {
                        to: from,
                        message: Message::LockGrant { object },
                    }])
                }
                Err(SceneError::LockHeld { .. }) => {
                    self.log.push(now, LogKind::LockDenied { object, to: from });
                    Ok(vec![Outbound {
                        to: from,
                        message: Message::LockDeny { object },
                    }])
                }
                Err(e) => Err(e.into()),
            },
            Message::LockRelease { object } => {
                self.scene.release_lock(object, from)?;
                Ok(vec![])
            }
            Message::JoinAck { .. } => Err(RuntimeError::UnexpectedMessage {
                from,
                what: "join acknowledgement",
            }),
            Message::StateUpdate(_) => Err(RuntimeError::UnexpectedMessage {
                from,
                what: "state update",
            }),
            Message::ProbePong { .. } => Err(RuntimeError::UnexpectedMessage {
                from,
                what: "probe pong",
            }),
            Message::LockGrant { .. } | Message::LockDeny { .. } => {
                Err(RuntimeError::UnexpectedMessage {
                    from,
                    what: "lock verdict",
                })
            }
        }
    }

    /// Begin an action on the server's own behalf and fan the resulting
    /// state update out to every joined client, lowest id first.
    pub fn begin_action(
        &mut self,
        object: ObjectId,
        name: impl Into<String>,
        motion: Motiond,
        now: f64,
    ) -> Result<(ControlPacketObject, Vec<Outbound>), RuntimeError> {
        self.scene.acquire_lock(object, self.id)?;
        let cpo = self.scene.begin_action(object, self.id, name, motion, now)?;
        self.log.push(
            now,
            LogKind::ActionInitiated {
                object,
                action: cpo.action.id,
            },
        );
        let targets: Vec<NodeId> = self.clients.iter().copied().collect();
        let mut out = Vec::with_capacity(targets.len());
        for to in targets {
            self.log.push(now, LogKind::CpoBroadcast { to, object });
            out.push(Outbound {
                to,
                message: Message::StateUpdate(cpo),
            });
        }
        Ok((cpo, out))
    }

    /// Advance every object's stored pose to `now`.
    pub fn render_tick(&mut self, now: f64) -> Result<(), RuntimeError> {
        Ok(self.scene.materialize_all(now)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Motion, Vec3};

    fn server_with_object() -> ServerNode {
        let mut s = ServerNode::new(NodeId(1));
        s.add_object(ObjectId(1), Posed::identity(), 0.0).unwrap();
        s
    }

    #[test]
    fn join_returns_snapshot_and_registers() {
        let mut s = server_with_object();
        let out = s.handle_message(NodeId(2), Message::Join, 1.0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].to, NodeId(2));
        match &out[0].message {
            Message::JoinAck { objects } => assert_eq!(objects.len(), 1),
            other => panic!("expected snapshot, got {other:?}"),
        }
        assert_eq!(s.clients().collect::<Vec<_>>(), vec![NodeId(2)]);
    }

    #[test]
    fn action_fans_out_to_all_clients_in_id_order() {
        let mut s = server_with_object();
        for id in [4, 2, 3] {
            s.handle_message(NodeId(id), Message::Join, 0.0).unwrap();
        }
        let (cpo, out) = s
            .begin_action(
                ObjectId(1),
                "spin",
                Motion::rotation(Vec3::unit_z(), 10.0).unwrap(),
                1.0,
            )
            .unwrap();
        assert_eq!(out.len(), 3);
        let order: Vec<NodeId> = out.iter().map(|o| o.to).collect();
        assert_eq!(order, vec![NodeId(2), NodeId(3), NodeId(4)]);
        for o in &out {
            assert_eq!(o.message, Message::StateUpdate(cpo));
        }
    }

    #[test]
    fn ping_answered_without_touching_scene() {
        let mut s = server_with_object();
        s.begin_action(
            ObjectId(1),
            "spin",
            Motion::rotation(Vec3::unit_z(), 50.0).unwrap(),
            0.0,
        )
        .unwrap();
        let before = s.scene().snapshot(1.0).unwrap();
        let out = s
            .handle_message(
                NodeId(2),
                Message::ProbePing {
                    probe_id: 7,
                    origin_time: 0.5,
                },
                1.0,
            )
            .unwrap();
        assert_eq!(
            out[0].message,
            Message::ProbePong {
                probe_id: 7,
                origin_time: 0.5,
            }
        );
        assert_eq!(s.scene().snapshot(1.0).unwrap(), before);
        assert_eq!(s.velocity_vector()[&ObjectId(1)], 50.0);
    }

    #[test]
    fn lock_contention_denied_until_release() {
        let mut s = server_with_object();
        let grant = s
            .handle_message(NodeId(2), Message::LockRequest { object: ObjectId(1) }, 0.0)
            .unwrap();
        assert_eq!(
            grant[0].message,
            Message::LockGrant { object: ObjectId(1) }
        );
        let deny = s
            .handle_message(NodeId(3), Message::LockRequest { object: ObjectId(1) }, 0.1)
            .unwrap();
        assert_eq!(deny[0].message, Message::LockDeny { object: ObjectId(1) });
        s.handle_message(NodeId(2), Message::LockRelease { object: ObjectId(1) }, 0.2)
            .unwrap();
        let grant = s
            .handle_message(NodeId(3), Message::LockRequest { object: ObjectId(1) }, 0.3)
            .unwrap();
        assert_eq!(
            grant[0].message,
            Message::LockGrant { object: ObjectId(1) }
        );
    }

    #[test]
    fn action_on_client_held_object_refused() {
        let mut s = server_with_object();
        s.handle_message(NodeId(2), Message::LockRequest { object: ObjectId(1) }, 0.0)
            .unwrap();
        let err = s
            .begin_action(ObjectId(1), "spin", Motiond::hold(), 1.0)
            .unwrap_err();
        assert!(matches!(
            err,
            RuntimeError::Scene(SceneError::LockHeld { .. })
        ));
    }

    #[test]
    fn unexpected_messages_surface() {
        let mut s = server_with_object();
        let err = s
            .handle_message(NodeId(2), Message::JoinAck { objects: vec![] }, 0.0)
            .unwrap_err();
        assert!(matches!(err, RuntimeError::UnexpectedMessage { .. }));
    }

    #[test]
    fn velocity_vector_tracks_active_actions() {
        let mut s = server_with_object();
        s.add_object(ObjectId(2), Posed::identity(), 0.0).unwrap();
        assert_eq!(s.velocity_vector()[&ObjectId(1)], 0.0);
        s.begin_action(
            ObjectId(1),
            "spin",
            Motion::rotation(Vec3::unit_z(), 75.0).unwrap(),
            0.0,
        )
        .unwrap();
        let v = s.velocity_vector();
        assert_eq!(v[&ObjectId(1)], 75.0);
        assert_eq!(v[&ObjectId(2)], 0.0);
    }
}
