use crate::scene::{ActionId, NodeId, ObjectId, SceneError};
use std::collections::BTreeMap;

/// One recorded action initiation: who changed what, and when.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub action: ActionId,
    pub object: ObjectId,
    pub node: NodeId,
    pub time: f64,
}

/// Time-ordered record of action initiations, used to estimate how often
/// each node changes the scene.
#[derive(Debug, Clone, Default)]
pub struct ActionTrace {
    entries: Vec<TraceEntry>,
}

impl ActionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record an initiation. Entries are kept sorted by time; ties keep
    /// insertion order.
    pub fn record(&mut self, entry: TraceEntry) {
        let at = self
            .entries
            .partition_point(|e| e.time <= entry.time);
        self.entries.insert(at, entry);
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mean rate (actions per second) at which `node` initiated actions over the
/// trailing observation window ending at `now`.
///
/// The window is `interval_count` consecutive intervals of `interval_len`
/// seconds each; the rate is the total count in the window divided by the
/// window length. Counting per interval and summing is equivalent, so the
/// intervals exist only to define the window.
pub fn action_frequency(
    trace: &ActionTrace,
    node: NodeId,
    now: f64,
    interval_count: u32,
    interval_len: f64,
) -> Result<f64, SceneError> {
    if interval_count == 0 {
        return Err(SceneError::BadWindow {
            what: "interval count must be positive",
        });
    }
    if interval_len <= 0.0 || !interval_len.is_finite() {
        return Err(SceneError::BadWindow {
            what: "interval length must be positive and finite",
        });
    }
    let window = interval_count as f64 * interval_len;
    let start = now - window;
    let hits = trace
        .entries
        .iter()
        .filter(|e| e.node == node && e.time > start && e.time <= now)
        .count();
    Ok(hits as f64 / window)
}

/// Highest update rate the link to a node can usefully carry: one state
/// update per one-way trip, i.e. the reciprocal of the one-way delay.
pub fn upshot_frequency(one_way_delay: f64) -> Result<f64, SceneError> {
    if one_way_delay <= 0.0 || !one_way_delay.is_finite() {
        return Err(SceneError::BadWindow {
            what: "one-way delay must be positive and finite",
        });
    }
    Ok(1.0 / one_way_delay)
}

/// Interaction tempo of a node relative to what its link can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tempo {
    /// The node initiates actions at least as fast as updates can arrive;
    /// per-update drift compensation alone cannot keep replicas aligned.
    High,
    /// Updates outpace initiations; drift compensation suffices.
    Low,
}

/// Outcome of comparing a node's action rate against its link capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyReport {
    pub node: NodeId,
    pub action_rate: f64,
    pub capacity_rate: f64,
    pub tempo: Tempo,
}

/// Classify a node's tempo: HIGH when it initiates actions at or above the
/// link's carrying rate, LOW otherwise.
pub fn classify_tempo(
    trace: &ActionTrace,
    node: NodeId,
    now: f64,
    interval_count: u32,
    interval_len: f64,
    one_way_delay: f64,
) -> Result<FrequencyReport, SceneError> {
    let action_rate = action_frequency(trace, node, now, interval_count, interval_len)?;
    let capacity_rate = upshot_frequency(one_way_delay)?;
    let tempo = if action_rate >= capacity_rate {
        Tempo::High
    } else {
        Tempo::Low
    };
    Ok(FrequencyReport {
        node,
        action_rate,
        capacity_rate,
        tempo,
    })
}

/// Per-node rates for every node that appears in the trace window.
pub fn all_rates(
    trace: &ActionTrace,
    now: f64,
    interval_count: u32,
    interval_len: f64,
) -> Result<BTreeMap<NodeId, f64>, SceneError> {
    let mut out = BTreeMap::new();
    for e in &trace.entries {
        if let std::collections::btree_map::Entry::Vacant(slot) = out.entry(e.node) {
            slot.insert(action_frequency(trace, e.node, now, interval_count, interval_len)?);
        }
    }
    Ok(out)
}
