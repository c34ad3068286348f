use scenesync_core::net::{decode, LinkModel, SimError, SimEvent, Simulation};
use scenesync_core::runtime::{ClientNode, Outbound, ServerNode};
use scenesync_core::scene::{NodeId, ObjectId};
use scenesync_core::Motiond;
use std::collections::BTreeMap;

pub const TAG_PROBE: u64 = 1;
pub const TAG_TICK: u64 = 2;

/// One server plus clients wired through the simulated network, with the
/// event dispatch every test needs: deliveries routed to the right node,
/// probe timers kept armed, optional render ticking.
pub struct Cluster {
    pub sim: Simulation,
    pub server: ServerNode,
    pub clients: BTreeMap<NodeId, ClientNode>,
    scheduled_probe: BTreeMap<NodeId, f64>,
    pub frame: Option<f64>,
}

#[allow(dead_code)]
impl Cluster {
    pub fn new(server: ServerNode) -> Self {
        Self {
            sim: Simulation::new(),
            server,
            clients: BTreeMap::new(),
            scheduled_probe: BTreeMap::new(),
            frame: None,
        }
    }

    pub fn add_client(&mut self, client: ClientNode) {
        self.clients.insert(client.id(), client);
    }

    pub fn client(&self, id: NodeId) -> &ClientNode {
        &self.clients[&id]
    }

    /// Wire both directions between the server and `node` with the same
    /// link model.
    pub fn wire(&mut self, node: NodeId, model: LinkModel) {
        let server = self.server.id();
        self.sim.add_link(server, node, model).unwrap();
        self.sim.add_link(node, server, model).unwrap();
    }

    /// Send the client's join request at the current instant.
    pub fn start_client(&mut self, id: NodeId) {
        let now = self.sim.now();
        let outs = self.clients.get_mut(&id).unwrap().start(now);
        send_all(&mut self.sim, id, outs);
    }

    /// Start an action on the server at the current instant and put the
    /// resulting state updates on the wire.
    pub fn server_begin_action(&mut self, object: ObjectId, name: &str, motion: Motiond) {
        let now = self.sim.now();
        let (_, outs) = self.server.begin_action(object, name, motion, now).unwrap();
        let server = self.server.id();
        send_all(&mut self.sim, server, outs);
    }

    /// Begin render ticking for the server and every client.
    pub fn start_ticking(&mut self, frame: f64) {
        self.frame = Some(frame);
        let t0 = self.sim.now();
        self.sim.wake_at(self.server.id(), TAG_TICK, t0).unwrap();
        let ids: Vec<NodeId> = self.clients.keys().copied().collect();
        for id in ids {
            self.sim.wake_at(id, TAG_TICK, t0).unwrap();
        }
    }

    /// Run the simulation to `until`, dispatching every event. Node errors
    /// panic: tests construct only valid traffic.
    pub fn run_to(&mut self, until: f64) {
        let Cluster {
            sim,
            server,
            clients,
            scheduled_probe,
            frame,
        } = self;
        let server_id = server.id();
        sim.run_until(until, |sim, firing| -> Result<(), SimError> {
            match firing.event {
                SimEvent::Deliver { from, to, bytes } => {
                    let (sender, msg) = decode(&bytes)?;
                    assert_eq!(sender, from);
                    if to == server_id {
                        let outs = server.handle_message(from, msg, firing.time).unwrap();
                        send_all(sim, server_id, outs);
                    } else {
                        let client = clients.get_mut(&to).unwrap();
                        let outs = client.handle_message(from, msg, firing.time).unwrap();
                        send_all(sim, to, outs);
                        arm_probe_timer(sim, client, scheduled_probe);
                    }
                }
                SimEvent::Wake { node, tag } => match tag {
                    TAG_PROBE => {
                        if let Some(client) = clients.get_mut(&node) {
                            let outs = client.on_probe_timer(firing.time);
                            send_all(sim, node, outs);
                            arm_probe_timer(sim, client, scheduled_probe);
                        }
                    }
                    TAG_TICK => {
                        if node == server_id {
                            server.render_tick(firing.time).unwrap();
                        } else if let Some(client) = clients.get_mut(&node) {
                            client.render_tick(firing.time).unwrap();
                        }
                        if let Some(frame) = *frame {
                            sim.wake_at(node, TAG_TICK, firing.time + frame)?;
                        }
                    }
                    _ => {}
                },
            }
            Ok(())
        })
        .unwrap();
    }
}

fn send_all(sim: &mut Simulation, from: NodeId, outs: Vec<Outbound>) {
    for out in outs {
        sim.send(from, out.to, &out.message).unwrap();
    }
}

fn arm_probe_timer(
    sim: &mut Simulation,
    client: &ClientNode,
    scheduled: &mut BTreeMap<NodeId, f64>,
) {
    let Some(due) = client.next_probe_time() else {
        return;
    };
    if due < sim.now() {
        return;
    }
    if scheduled.get(&client.id()) == Some(&due) {
        return;
    }
    sim.wake_at(client.id(), TAG_PROBE, due).unwrap();
    scheduled.insert(client.id(), due);
}
