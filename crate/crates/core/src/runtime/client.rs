use crate::net::Message;
use crate::runtime::{EventLog, LogKind, Outbound, RuntimeError};
use crate::scene::{Action, ControlPacketObject, NodeId, ObjectId, Scene};
use crate::sync::{correct_pose, rtt_to_delay, DelayHistory, DriftVector, ProbeRateConfig};
use crate::Posed;
use std::collections::BTreeMap;

/// How probe pacing behaves once bootstrap measurement is done.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// Probe at the starting rate forever.
    Fixed,
    /// Let the delay history speed probing up and slow it down.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClientConfig {
    /// When off, state updates are installed verbatim at arrival and no
    /// probes are sent.
    pub sync_enabled: bool,
    pub probe_mode: ProbeMode,
    pub probe: ProbeRateConfig,
    /// Delay samples kept for rate adaptation.
    pub history_window: usize,
    /// Probes fired back-to-back right after joining to seed the delay
    /// estimate.
    pub boot_probe_count: usize,
    /// Seconds to wait for the join reply.
    pub join_timeout: f64,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self {
            sync_enabled: true,
            probe_mode: ProbeMode::Adaptive,
            probe: ProbeRateConfig::default(),
            history_window: 100,
            boot_probe_count: 5,
            join_timeout: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientPhase {
    /// Constructed, not yet started.
    Idle,
    /// Join sent, waiting for the scene.
    Joining,
    /// Scene installed, measuring the delay with the bootstrap burst.
    Boot,
    /// Fully operational.
    Ready,
}

/// A replica node: joins a server, measures its one-way delay, and keeps its
/// local scene aligned with the authoritative one.
pub struct ClientNode {
    id: NodeId,
    server: NodeId,
    config: ClientConfig,
    phase: ClientPhase,
    scene: Scene,
    /// Local copy of each object's action speed.
    velocities: BTreeMap<ObjectId, f64>,
    /// Per-object drift, recomputed whenever speeds or the delay change.
    drift: Option<DriftVector>,
    history: DelayHistory,
    /// Latest one-way delay estimate, seconds.
    estimated_delay: Option<f64>,
    boot_samples: Vec<f64>,
    next_probe_id: u32,
    /// Outstanding probes: id to send time.
    inflight: BTreeMap<u32, f64>,
    next_probe_at: Option<f64>,
    /// Newest installed state timestamp per object, for staleness checks.
    installed_ts: BTreeMap<ObjectId, f64>,
    join_sent_at: Option<f64>,
    log: EventLog,
}

impl ClientNode {
    pub fn new(id: NodeId, server: NodeId, config: ClientConfig) -> Result<Self, RuntimeError> {
        let history = DelayHistory::new(config.history_window, config.probe)?;
        Ok(Self {
            id,
            server,
            config,
            phase: ClientPhase::Idle,
            scene: Scene::new(),
            velocities: BTreeMap::new(),
            drift: None,
            history,
            estimated_delay: None,
            boot_samples: Vec::new(),
            next_probe_id: 1,
            inflight: BTreeMap::new(),
            next_probe_at: None,
            installed_ts: BTreeMap::new(),
            join_sent_at: None,
            log: EventLog::new(),
        })
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn phase(&self) -> ClientPhase {
        self.phase
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn velocity_vector(&self) -> BTreeMap<ObjectId, f64> {
        self.velocities.clone()
    }

    pub fn drift_vector(&self) -> Option<&DriftVector> {
        self.drift.as_ref()
    }

    pub fn estimated_delay(&self) -> Option<f64> {
        self.estimated_delay
    }

    pub fn history(&self) -> &DelayHistory {
        &self.history
    }

    /// Probes per second the client is currently pacing at.
    pub fn gamma(&self) -> f64 {
        match self.config.probe_mode {
            ProbeMode::Fixed => self.config.probe.gamma_start,
            ProbeMode::Adaptive => self.history.gamma(),
        }
    }

    fn current_interval(&self) -> f64 {
        1.0 / self.gamma()
    }

    /// When the next steady probe is due, if steady probing is active.
    pub fn next_probe_time(&self) -> Option<f64> {
        self.next_probe_at
    }

    /// Replica pose of one object at time `t`, extrapolated closed-form.
    pub fn object_pose_at(&self, object: ObjectId, t: f64) -> Result<Posed, RuntimeError> {
        let obj = self
            .scene
            .object(object)
            .ok_or(RuntimeError::UnknownObject(object))?;
        Ok(obj.pose_at(t)?)
    }

    /// Kick off the session: send the join request.
    pub fn start(&mut self, now: f64) -> Vec<Outbound> {
        self.phase = ClientPhase::Joining;
        self.join_sent_at = Some(now);
        self.log.push(now, LogKind::JoinSent);
        vec![Outbound {
            to: self.server,
            message: Message::Join,
        }]
    }

    /// Fail the join if the reply never came within the configured window.
    pub fn check_join_timeout(&self, now: f64) -> Result<(), RuntimeError> {
        if self.phase == ClientPhase::Joining {
            if let Some(sent) = self.join_sent_at {
                if now - sent > self.config.join_timeout {
                    return Err(RuntimeError::JoinTimeout {
                        timeout: self.config.join_timeout,
                    });
                }
            }
        }
        Ok(())
    }

    fn make_ping(&mut self, now: f64) -> Outbound {
        let probe_id = self.next_probe_id;
        self.next_probe_id += 1;
        self.inflight.insert(probe_id, now);
        self.log.push(now, LogKind::ProbeSent { probe_id });
        Outbound {
            to: self.server,
            message: Message::ProbePing {
                probe_id,
                origin_time: now,
            },
        }
    }

    /// Give up on probes unanswered for ten round trips.
    fn prune_inflight(&mut self, now: f64) {
        let Some(delay) = self.estimated_delay else {
            return;
        };
        if delay <= 0.0 {
            return;
        }
        let cutoff = 10.0 * (2.0 * delay);
        let stale: Vec<u32> = self
            .inflight
            .iter()
            .filter(|(_, &sent)| now - sent > cutoff)
            .map(|(&id, _)| id)
            .collect();
        for probe_id in stale {
            self.inflight.remove(&probe_id);
            self.log.push(now, LogKind::ProbeAbandoned { probe_id });
        }
    }

    fn update_drift(&mut self, now: f64) -> Result<(), RuntimeError> {
        let delay = self.estimated_delay.unwrap_or(0.0);
        let entries = self.velocities.iter().map(|(&k, &v)| (k, v));
        self.drift = Some(DriftVector::compute(self.server, delay, entries)?);
        self.log.push(now, LogKind::DriftUpdated { delay });
        Ok(())
    }

    fn install_state(
        &mut self,
        cpo: &ControlPacketObject,
        pose: Posed,
        now: f64,
        corrected: bool,
    ) -> Result<(), RuntimeError> {
        let action = Action::new(
            cpo.action.id,
            "remote",
            cpo.action.motion()?,
            cpo.action.start_time,
        )?;
        let obj = self
            .scene
            .object_mut(cpo.object_id)
            .ok_or(RuntimeError::UnknownObject(cpo.object_id))?;
        obj.set_state(pose, now, Some(action));
        self.installed_ts
            .insert(cpo.object_id, cpo.server_timestamp);
        self.log.push(
            now,
            LogKind::PoseWritten {
                object: cpo.object_id,
                corrected,
            },
        );
        Ok(())
    }

    fn handle_state_update(
        &mut self,
        cpo: ControlPacketObject,
        now: f64,
    ) -> Result<Vec<Outbound>, RuntimeError> {
        if self.scene.object(cpo.object_id).is_none() {
            return Err(RuntimeError::UnknownObject(cpo.object_id));
        }
        if let Some(&seen) = self.installed_ts.get(&cpo.object_id) {
            if cpo.server_timestamp < seen {
                self.log.push(
                    now,
                    LogKind::StaleUpdateIgnored {
                        object: cpo.object_id,
                    },
                );
                return Ok(vec![]);
            }
        }
        self.log.push(
            now,
            LogKind::CpoReceived {
                object: cpo.object_id,
                action: cpo.action.id,
            },
        );
        self.velocities.insert(cpo.object_id, cpo.action.velocity);
        self.log.push(
            now,
            LogKind::ActionsUpdated {
                object: cpo.object_id,
                velocity: cpo.action.velocity,
            },
        );
        self.update_drift(now)?;
        let correct = self.config.sync_enabled && self.estimated_delay.is_some();
        let pose = if correct {
            correct_pose(&cpo, self.estimated_delay.unwrap())?
        } else {
            cpo.pose
        };
        self.install_state(&cpo, pose, now, correct)?;
        Ok(vec![])
    }

    fn handle_join_ack(
        &mut self,
        objects: Vec<ControlPacketObject>,
        now: f64,
    ) -> Result<Vec<Outbound>, RuntimeError> {
        self.log.push(
            now,
            LogKind::JoinAckReceived {
                objects: objects.len(),
            },
        );
        // Anchor each pose at the local arrival instant: the receiver has no
        // shared clock, so the snapshot necessarily lands one trip stale.
        // The bootstrap burst measures that trip and jumps the scene forward.
        for cpo in &objects {
            self.scene.add_object(cpo.object_id, cpo.pose, now)?;
            let action = Action::new(
                cpo.action.id,
                "remote",
                cpo.action.motion()?,
                cpo.action.start_time,
            )?;
            let obj = self.scene.object_mut(cpo.object_id).expect("just added");
            obj.set_state(cpo.pose, now, Some(action));
            self.installed_ts
                .insert(cpo.object_id, cpo.server_timestamp);
            self.velocities.insert(cpo.object_id, cpo.action.velocity);
        }
        if !self.config.sync_enabled {
            self.phase = ClientPhase::Ready;
            return Ok(vec![]);
        }
        if self.config.boot_probe_count == 0 {
            self.phase = ClientPhase::Ready;
            let ping = self.make_ping(now);
            self.next_probe_at = Some(now + self.current_interval());
            return Ok(vec![ping]);
        }
        self.phase = ClientPhase::Boot;
        Ok(vec![self.make_ping(now)])
    }

    fn finish_boot(&mut self, now: f64) -> Result<(), RuntimeError> {
        let mean =
            self.boot_samples.iter().sum::<f64>() / self.boot_samples.len() as f64;
        self.estimated_delay = Some(mean);
        self.log.push(now, LogKind::BootCompleted { delay: mean });
        self.log.push(now, LogKind::DelayEstimated { delay: mean });
        // The snapshot was installed verbatim, so every replica pose still
        // lags by one trip: jump each object forward by the fresh estimate.
        for id in self.installed_ts.keys().copied().collect::<Vec<_>>() {
            let obj = self.scene.object_mut(id).expect("installed");
            obj.nudge_forward(mean)?;
        }
        self.update_drift(now)?;
        self.phase = ClientPhase::Ready;
        self.next_probe_at = Some(now + self.current_interval());
        Ok(())
    }

    fn handle_pong(
        &mut self,
        probe_id: u32,
        origin_time: f64,
        now: f64,
    ) -> Result<Vec<Outbound>, RuntimeError> {
        let Some(sent) = self.inflight.remove(&probe_id) else {
            // Answered after abandonment; nothing to learn.
            return Ok(vec![]);
        };
        debug_assert_eq!(sent, origin_time);
        let rtt = now - origin_time;
        self.log.push(now, LogKind::PongReceived { probe_id, rtt });
        let h0 = rtt_to_delay(rtt)?;
        match self.phase {
            ClientPhase::Boot => {
                self.boot_samples.push(h0);
                self.history.record(h0)?;
                if self.boot_samples.len() < self.config.boot_probe_count {
                    return Ok(vec![self.make_ping(now)]);
                }
                self.finish_boot(now)?;
                Ok(vec![])
            }
            ClientPhase::Ready => {
                self.estimated_delay = Some(h0);
                self.log.push(now, LogKind::DelayEstimated { delay: h0 });
                self.history.record(h0)?;
                if self.config.probe_mode == ProbeMode::Adaptive {
                    if let Some(decision) = self.history.adapt_rate(h0) {
                        if decision.gamma_after != decision.gamma_before {
                            self.log.push(
                                now,
                                LogKind::RateChanged {
                                    from: decision.gamma_before,
                                    to: decision.gamma_after,
                                    in_band: decision.in_band,
                                },
                            );
                        }
                    }
                }
                self.update_drift(now)?;
                self.next_probe_at = Some(now + self.current_interval());
                Ok(vec![])
            }
            _ => Ok(vec![]),
        }
    }

    /// Apply one inbound message, producing any replies.
    pub fn handle_message(
        &mut self,
        from: NodeId,
        msg: Message,
        now: f64,
    ) -> Result<Vec<Outbound>, RuntimeError> {
        self.prune_inflight(now);
        match msg {
            Message::JoinAck { objects } => self.handle_join_ack(objects, now),
            Message::StateUpdate(cpo) => self.handle_state_update(cpo, now),
            Message::ProbePong {
                probe_id,
                origin_time,
            } => self.handle_pong(probe_id, origin_time, now),
            Message::LockGrant { .. } | Message::LockDeny { .. } => Ok(vec![]),
            Message::Join
            | Message::LockRequest { .. }
            | Message::LockRelease { .. }
            | Message::ProbePing { .. } => Err(RuntimeError::UnexpectedMessage {
                from,
                what: "server-bound message",
            }),
        }
    }

    /// Fire the steady probe timer if it is due; otherwise do nothing.
    pub fn on_probe_timer(&mut self, now: f64) -> Vec<Outbound> {
        self.prune_inflight(now);
        let Some(due) = self.next_probe_at else {
            return vec![];
        };
        if self.phase != ClientPhase::Ready || now < due - 1e-12 {
            return vec![];
        }
        let ping = self.make_ping(now);
        self.next_probe_at = Some(now + self.current_interval());
        vec![ping]
    }

    /// Advance every replica pose to `now` under its installed action.
    pub fn render_tick(&mut self, now: f64) -> Result<(), RuntimeError> {
        Ok(self.scene.materialize_all(now)?)
    }
}
