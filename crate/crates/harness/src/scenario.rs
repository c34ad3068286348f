use crate::config::ScenarioConfig;
use crate::psi::psi_from_samples;
use crate::report::{DriftSample, ProbePoint};
use crate::schedule::{build_rotation_schedule, trace_from_schedule, ScheduledAction};
use crate::HarnessError;
use scenesync_core::geometry::drift_angle;
use scenesync_core::net::{decode, LinkModel, Message, SimEvent, Simulation};
use scenesync_core::runtime::{
    ClientConfig, ClientNode, LogKind, Outbound, ProbeMode, ServerNode,
};
use scenesync_core::scene::{classify_tempo, FrequencyReport, NodeId, ObjectId, Tempo};
use scenesync_core::seedstream::derive_seed;
use scenesync_core::Posed;
use std::collections::BTreeMap;

pub const SERVER_ID: NodeId = NodeId(1);
pub const OBJECT_ID: ObjectId = ObjectId(1);
/// Clients join at t = 0 and have a full second to boot before the script.
pub const ACTION_START_S: f64 = 1.0;

const TAG_PROBE: u64 = 1;
const TAG_TICK: u64 = 2;
const TAG_ACTION: u64 = 3;
const TAG_STEP: u64 = 4;

/// Seed stream ids for per-link jitter; stream 1 belongs to the schedule.
fn link_stream(client: NodeId, toward_server: bool) -> u64 {
    0x100 + 2 * client.0 as u64 + toward_server as u64
}

/// Everything a finished run reports.
pub struct ScenarioOutcome {
    pub samples: Vec<DriftSample>,
    /// Ordered key = value pairs for the summary file.
    pub summary: Vec<(String, String)>,
    pub report: FrequencyReport,
}

pub struct ProbeDemoOutcome {
    pub points: Vec<ProbePoint>,
    pub probes_sent: usize,
    pub final_gamma: f64,
}

/// Tempo verdict for the configured script, computable before running it:
/// the server's scripted action rate against what the link can carry.
pub fn classify(cfg: &ScenarioConfig) -> Result<FrequencyReport, HarnessError> {
    cfg.validate()?;
    let schedule = build_rotation_schedule(cfg, ACTION_START_S);
    let trace = trace_from_schedule(&schedule, SERVER_ID, OBJECT_ID);
    let end = schedule.last().expect("non-empty schedule").end_s();
    Ok(classify_tempo(
        &trace,
        SERVER_ID,
        end,
        1,
        end,
        cfg.base_delay_s,
    )?)
}

/// Run the scripted scenario and capture one drift sample per client at
/// every action initiation.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome, HarnessError> {
    cfg.validate()?;
    let report = classify(cfg)?;
    let schedule = build_rotation_schedule(cfg, ACTION_START_S);
    let end = schedule.last().expect("non-empty schedule").end_s();

    let mut driver = Driver::new(cfg, schedule)?;
    driver.start(cfg, true)?;
    driver.run(end)?;

    let summary = build_summary(cfg, &driver.samples, &report)?;
    Ok(ScenarioOutcome {
        samples: driver.samples,
        summary,
        report,
    })
}

/// Run probes only (no actions, no rendering) and capture the rate series,
/// optionally stepping the link delay mid-run.
pub fn probe_demo(cfg: &ScenarioConfig) -> Result<ProbeDemoOutcome, HarnessError> {
    cfg.validate()?;
    if !cfg.sync_enabled {
        return Err(HarnessError::Validation {
            what: "the probe demo needs sync = on".into(),
        });
    }
    let mut driver = Driver::new(cfg, Vec::new())?;
    driver.watch_probes_of = Some(NodeId(2));
    driver.start(cfg, false)?;
    driver.run(cfg.duration_s)?;

    let client = &driver.clients[&NodeId(2)];
    let probes_sent = client
        .log()
        .find(|k| matches!(k, LogKind::ProbeSent { .. }))
        .len();
    Ok(ProbeDemoOutcome {
        points: driver.probe_points,
        probes_sent,
        final_gamma: client.gamma(),
    })
}

fn client_config(cfg: &ScenarioConfig) -> ClientConfig {
    ClientConfig {
        sync_enabled: cfg.sync_enabled,
        probe_mode: cfg.probe_mode,
        probe: cfg.probe_rate(),
        history_window: cfg.probe_window,
        boot_probe_count: cfg.boot_probes,
        join_timeout: 5.0,
    }
}

struct Driver {
    sim: Simulation,
    server: ServerNode,
    clients: BTreeMap<NodeId, ClientNode>,
    scheduled_probe: BTreeMap<NodeId, f64>,
    frame_s: f64,
    schedule: Vec<ScheduledAction>,
    next_action: usize,
    samples: Vec<DriftSample>,
    probe_points: Vec<ProbePoint>,
    watch_probes_of: Option<NodeId>,
    delay_step: Option<(f64, f64)>,
}

impl Driver {
    fn new(cfg: &ScenarioConfig, schedule: Vec<ScheduledAction>) -> Result<Self, HarnessError> {
        let mut sim = Simulation::new();
        let mut server = ServerNode::new(SERVER_ID);
        server.add_object(OBJECT_ID, Posed::identity(), 0.0)?;

        let mut clients = BTreeMap::new();
        for id in 2..=cfg.nodes {
            let node = NodeId(id);
            clients.insert(node, ClientNode::new(node, SERVER_ID, client_config(cfg))?);
            for toward_server in [true, false] {
                let model = LinkModel {
                    base_delay: cfg.base_delay_s,
                    jitter: cfg.jitter,
                    seed: derive_seed(cfg.seed, link_stream(node, toward_server)),
                };
                let (from, to) = if toward_server {
                    (node, SERVER_ID)
                } else {
                    (SERVER_ID, node)
                };
                sim.add_link(from, to, model)?;
            }
        }

        Ok(Self {
            sim,
            server,
            clients,
            scheduled_probe: BTreeMap::new(),
            frame_s: cfg.frame_s,
            schedule,
            next_action: 0,
            samples: Vec::new(),
            probe_points: Vec::new(),
            watch_probes_of: None,
            delay_step: cfg.delay_step,
        })
    }

    /// Send the joins and arm every pre-known wake: one per scripted action,
    /// the optional delay step, and (for rendered runs) the tick trains.
    /// Tick phases are spread across nodes to stand in for heterogeneous
    /// hardware; samples are closed-form, so phase never biases them.
    fn start(&mut self, cfg: &ScenarioConfig, with_ticks: bool) -> Result<(), HarnessError> {
        let ids: Vec<NodeId> = self.clients.keys().copied().collect();
        for &id in &ids {
            let now = self.sim.now();
            let outs = self.clients.get_mut(&id).unwrap().start(now);
            send_all(&mut self.sim, id, outs)?;
        }
        for action in &self.schedule {
            self.sim.wake_at(SERVER_ID, TAG_ACTION, action.start_s)?;
        }
        if let Some((at, _)) = self.delay_step {
            self.sim.wake_at(SERVER_ID, TAG_STEP, at)?;
        }
        if with_ticks {
            self.sim.wake_at(SERVER_ID, TAG_TICK, 0.0)?;
            for (i, &id) in ids.iter().enumerate() {
                let phase = self.frame_s * (i + 1) as f64 / cfg.nodes as f64;
                self.sim.wake_at(id, TAG_TICK, phase)?;
            }
        }
        Ok(())
    }

    fn run(&mut self, until: f64) -> Result<(), HarnessError> {
        let Driver {
            sim,
            server,
            clients,
            scheduled_probe,
            frame_s,
            schedule,
            next_action,
            samples,
            probe_points,
            watch_probes_of,
            delay_step,
        } = self;
        let frame_s = *frame_s;
        sim.run_until(until, |sim, firing| -> Result<(), HarnessError> {
            let now = firing.time;
            match firing.event {
                SimEvent::Deliver { from, to, bytes } => {
                    let (_, msg) = decode(&bytes).map_err(scenesync_core::net::SimError::from)?;
                    if to == SERVER_ID {
                        let outs = server.handle_message(from, msg, now)?;
                        send_all(sim, SERVER_ID, outs)?;
                    } else {
                        let client = clients.get_mut(&to).ok_or(HarnessError::Validation {
                            what: format!("message addressed to unknown node {to}"),
                        })?;
                        let pong_origin = match msg {
                            Message::ProbePong { origin_time, .. } => Some(origin_time),
                            _ => None,
                        };
                        let log_before = client.log().len();
                        let outs = client.handle_message(from, msg, now)?;
                        send_all(sim, to, outs)?;
                        arm_probe_timer(sim, client, scheduled_probe)?;
                        if *watch_probes_of == Some(to) && client.log().len() > log_before {
                            if let Some(origin) = pong_origin {
                                probe_points.push(ProbePoint {
                                    time_s: now,
                                    h0_s: (now - origin) * 0.5,
                                    h_mean_s: client.history().mean(),
                                    sigma_s: client.history().sigma(),
                                    gamma0_per_s: client.gamma(),
                                });
                            }
                        }
                    }
                }
                SimEvent::Wake { node, tag } => match tag {
                    TAG_PROBE => {
                        if let Some(client) = clients.get_mut(&node) {
                            let outs = client.on_probe_timer(now);
                            send_all(sim, node, outs)?;
                            arm_probe_timer(sim, client, scheduled_probe)?;
                        }
                    }
                    TAG_TICK => {
                        if node == SERVER_ID {
                            server.render_tick(now)?;
                        } else if let Some(client) = clients.get_mut(&node) {
                            client.render_tick(now)?;
                        }
                        sim.wake_at(node, TAG_TICK, now + frame_s)?;
                    }
                    TAG_ACTION => {
                        let action = schedule[*next_action];
                        *next_action += 1;
                        let live = server
                            .scene()
                            .object(OBJECT_ID)
                            .expect("scripted object")
                            .pose_at(now)?;
                        for (&id, client) in clients.iter() {
                            let replica = client.object_pose_at(OBJECT_ID, now)?;
                            samples.push(DriftSample {
                                sample_index: action.index,
                                node: id,
                                velocity_dps: action.velocity_dps,
                                alpha_deg: drift_angle(
                                    live.orientation,
                                    replica.orientation,
                                )
                                .degrees(),
                                virtual_time_s: now,
                            });
                        }
                        let name = format!("rot{}", *next_action);
                        let (_, outs) =
                            server.begin_action(OBJECT_ID, name, action.motion(), now)?;
                        send_all(sim, SERVER_ID, outs)?;
                    }
                    TAG_STEP => {
                        if let Some((_, delay)) = *delay_step {
                            let ids: Vec<NodeId> = clients.keys().copied().collect();
                            for id in ids {
                                sim.set_base_delay(id, SERVER_ID, delay)?;
                                sim.set_base_delay(SERVER_ID, id, delay)?;
                            }
                        }
                    }
                    _ => {}
                },
            }
            Ok(())
        })
    }
}

fn send_all(sim: &mut Simulation, from: NodeId, outs: Vec<Outbound>) -> Result<(), HarnessError> {
    for out in outs {
        sim.send(from, out.to, &out.message)?;
    }
    Ok(())
}

fn arm_probe_timer(
    sim: &mut Simulation,
    client: &ClientNode,
    scheduled: &mut BTreeMap<NodeId, f64>,
) -> Result<(), HarnessError> {
    let Some(due) = client.next_probe_time() else {
        return Ok(());
    };
    if due < sim.now() || scheduled.get(&client.id()) == Some(&due) {
        return Ok(());
    }
    sim.wake_at(client.id(), TAG_PROBE, due)?;
    scheduled.insert(client.id(), due);
    Ok(())
}

fn tempo_str(tempo: Tempo) -> &'static str {
    match tempo {
        Tempo::High => "high",
        Tempo::Low => "low",
    }
}

fn build_summary(
    cfg: &ScenarioConfig,
    samples: &[DriftSample],
    report: &FrequencyReport,
) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out: Vec<(String, String)> = vec![
        ("nodes".into(), format!("{}", cfg.nodes)),
        ("seed".into(), format!("{}", cfg.seed)),
        (
            "sync".into(),
            if cfg.sync_enabled { "on" } else { "off" }.into(),
        ),
        (
            "probe_mode".into(),
            match cfg.probe_mode {
                ProbeMode::Adaptive => "adaptive",
                ProbeMode::Fixed => "fixed",
            }
            .into(),
        ),
        ("tempo".into(), tempo_str(report.tempo).into()),
        (
            "action_rate_per_s".into(),
            format!("{}", report.action_rate),
        ),
        (
            "capacity_rate_per_s".into(),
            format!("{}", report.capacity_rate),
        ),
        ("samples".into(), format!("{}", samples.len())),
    ];

    let alphas: Vec<f64> = samples.iter().map(|s| s.alpha_deg).collect();
    out.push(("max_alpha_deg".into(), format!("{}", max_of(&alphas))));
    out.push(("mean_alpha_deg".into(), format!("{}", mean_of(&alphas))));
    let (_, psi) = psi_from_samples(samples)?;
    out.push(("psi_deg".into(), format!("{psi}")));

    for client in 2..=cfg.nodes {
        for &velocity in &cfg.velocities_dps {
            let subset: Vec<f64> = samples
                .iter()
                .filter(|s| s.node.0 == client && s.velocity_dps == velocity)
                .map(|s| s.alpha_deg)
                .collect();
            let prefix = format!("node_{client}_v{velocity}");
            out.push((
                format!("{prefix}_mean_alpha_deg"),
                format!("{}", mean_of(&subset)),
            ));
            out.push((
                format!("{prefix}_max_alpha_deg"),
                format!("{}", max_of(&subset)),
            ));
        }
    }
    Ok(out)
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
