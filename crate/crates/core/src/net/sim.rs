use crate::net::link::{Link, LinkModel};
use crate::net::wire::{encode, Message, ProtocolError};
use crate::net::NetError;
use crate::scene::NodeId;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, BTreeMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no link from {from} to {to}")]
    NoLink { from: NodeId, to: NodeId },
    #[error("link from {from} to {to} already exists")]
    DuplicateLink { from: NodeId, to: NodeId },
    #[error("cannot schedule at {at}s: the clock is already at {now}s")]
    TimePast { at: f64, now: f64 },
    #[error("non-finite time")]
    NonFiniteTime,
    #[error(transparent)]
    Link(#[from] NetError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Something the simulation hands to the driver when its time comes.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    /// A datagram reached its destination. Bytes travel encoded, exactly as
    /// they would on a real socket; the driver decodes on receipt.
    Deliver {
        from: NodeId,
        to: NodeId,
        bytes: Vec<u8>,
    },
    /// A timer set with [`Simulation::wake_at`] fired.
    Wake { node: NodeId, tag: u64 },
}

/// An event plus the instant it fires.
#[derive(Debug, Clone, PartialEq)]
pub struct Firing {
    pub time: f64,
    pub event: SimEvent,
}

struct Queued {
    time: f64,
    seq: u64,
    event: SimEvent,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the earliest event (ties by
        // scheduling order) pops first.
        self.time
            .total_cmp(&other.time)
            .then(self.seq.cmp(&other.seq))
            .reverse()
    }
}

/// Deterministic discrete-event network: directed links with latency and
/// jitter, a virtual clock, and per-node timers.
pub struct Simulation {
    now: f64,
    seq: u64,
    queue: BinaryHeap<Queued>,
    links: BTreeMap<(NodeId, NodeId), Link>,
}

impl Default for Simulation {
    fn default() -> Self {
        Self::new()
    }
}

impl Simulation {
    pub fn new() -> Self {
        Self {
            now: 0.0,
            seq: 0,
            queue: BinaryHeap::new(),
            links: BTreeMap::new(),
        }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn add_link(
        &mut self,
        from: NodeId,
        to: NodeId,
        model: LinkModel,
    ) -> Result<(), SimError> {
        if self.links.contains_key(&(from, to)) {
            return Err(SimError::DuplicateLink { from, to });
        }
        self.links.insert((from, to), Link::new(model)?);
        Ok(())
    }

    pub fn has_link(&self, from: NodeId, to: NodeId) -> bool {
        self.links.contains_key(&(from, to))
    }

    /// Change one directed link's base delay mid-run.
    pub fn set_base_delay(
        &mut self,
        from: NodeId,
        to: NodeId,
        base_delay: f64,
    ) -> Result<(), SimError> {
        let link = self
            .links
            .get_mut(&(from, to))
            .ok_or(SimError::NoLink { from, to })?;
        Ok(link.set_base_delay(base_delay)?)
    }

    fn push(&mut self, time: f64, event: SimEvent) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Queued { time, seq, event });
    }

    /// Encode `msg` and put it on the wire from `from` to `to` at the
    /// current instant. Returns the delivery time.
    pub fn send(&mut self, from: NodeId, to: NodeId, msg: &Message) -> Result<f64, SimError> {
        let bytes = encode(from, msg)?;
        let link = self
            .links
            .get_mut(&(from, to))
            .ok_or(SimError::NoLink { from, to })?;
        let at = link.delivery_time(self.now);
        self.push(at, SimEvent::Deliver { from, to, bytes });
        Ok(at)
    }

    /// Arrange for `node` to be woken at time `at` with `tag`.
    pub fn wake_at(&mut self, node: NodeId, tag: u64, at: f64) -> Result<(), SimError> {
        if !at.is_finite() {
            return Err(SimError::NonFiniteTime);
        }
        if at < self.now {
            return Err(SimError::TimePast { at, now: self.now });
        }
        self.push(at, SimEvent::Wake { node, tag });
        Ok(())
    }

    /// Fire every event up to and including time `until`, in time order
    /// (ties in scheduling order), advancing the clock to each event and
    /// finally to `until`. The handler may send, wake, and reconfigure
    /// links; events it schedules within the horizon fire in the same call.
    /// The error type is the handler's; simulation errors convert into it.
    pub fn run_until<F, E>(&mut self, until: f64, mut handler: F) -> Result<(), E>
    where
        F: FnMut(&mut Simulation, Firing) -> Result<(), E>,
        E: From<SimError>,
    {
        if !until.is_finite() {
            return Err(SimError::NonFiniteTime.into());
        }
        if until < self.now {
            return Err(SimError::TimePast {
                at: until,
                now: self.now,
            }
            .into());
        }
        while let Some(head) = self.queue.peek() {
            if head.time > until {
                break;
            }
            let q = self.queue.pop().expect("peeked");
            self.now = self.now.max(q.time);
            handler(
                self,
                Firing {
                    time: q.time,
                    event: q.event,
                },
            )?;
        }
        self.now = self.now.max(until);
        Ok(())
    }
}
