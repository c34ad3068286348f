use crate::scene::{ActionId, NodeId, ObjectId};

/// What a node did or observed, for inspection after a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogKind {
    JoinSent,
    JoinAckReceived { objects: usize },
    ClientJoined { client: NodeId },
    /// A state update arrived and passed validation.
    CpoReceived { object: ObjectId, action: ActionId },
    /// The local velocity table took the update's action into account.
    ActionsUpdated { object: ObjectId, velocity: f64 },
    /// Per-object drift recomputed from velocities and the delay estimate.
    DriftUpdated { delay: f64 },
    /// The replica pose was overwritten from a state update.
    PoseWritten { object: ObjectId, corrected: bool },
    /// A state update older than the installed state was dropped.
    StaleUpdateIgnored { object: ObjectId },
    ProbeSent { probe_id: u32 },
    PongReceived { probe_id: u32, rtt: f64 },
    /// The one-way delay estimate changed.
    DelayEstimated { delay: f64 },
    /// The probe rate moved, with the band verdict that moved it.
    RateChanged { from: f64, to: f64, in_band: bool },
    /// An unanswered probe was given up on.
    ProbeAbandoned { probe_id: u32 },
    /// Bootstrap probing finished with this delay estimate.
    BootCompleted { delay: f64 },
    ActionInitiated { object: ObjectId, action: ActionId },
    CpoBroadcast { to: NodeId, object: ObjectId },
    LockGranted { object: ObjectId, to: NodeId },
    LockDenied { object: ObjectId, to: NodeId },
    /// A node initiates actions faster than its link can carry updates.
    HighFrequencyWarning {
        node: NodeId,
        rate: f64,
        capacity: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub time: f64,
    pub kind: LogKind,
}

/// Append-only record of one node's observable steps, in the order they
/// happened.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    entries: Vec<LogEntry>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: LogKind) {
        self.entries.push(LogEntry { time, kind });
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries matching a predicate, with their positions in the log.
    pub fn find<'a, P>(&'a self, mut pred: P) -> Vec<(usize, &'a LogEntry)>
    where
        P: FnMut(&LogKind) -> bool + 'a,
    {
        self.entries
            .iter()
            .enumerate()
            .filter(move |(_, e)| pred(&e.kind))
            .collect()
    }
}
