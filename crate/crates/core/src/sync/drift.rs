use crate::geometry::Real;
use crate::scene::{NodeId, ObjectId};
use crate::sync::SyncError;
use std::collections::BTreeMap;

/// How far a replica lags the live object: the action's speed times the
/// one-way transport delay. For rotations this is an angle in degrees; for
/// translations, a distance.
pub fn drift_value<T: Real>(velocity: T, one_way_delay: T) -> Result<T, SyncError> {
    if !velocity.is_finite() {
        return Err(SyncError::NonFinite { what: "velocity" });
    }
    if !one_way_delay.is_finite() {
        return Err(SyncError::NonFinite { what: "one-way delay" });
    }
    if velocity < T::zero() {
        return Err(SyncError::NegativeVelocity {
            velocity: velocity.to_f64().unwrap_or(f64::NAN),
        });
    }
    if one_way_delay < T::zero() {
        return Err(SyncError::NegativeDelay {
            delay: one_way_delay.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(velocity * one_way_delay)
}

/// Drift of every transforming object as seen by one node, computed from
/// that node's measured one-way delay.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftVector {
    pub node: NodeId,
    pub measured_delay: f64,
    entries: BTreeMap<ObjectId, f64>,
}

impl DriftVector {
    pub fn compute<I>(node: NodeId, measured_delay: f64, velocities: I) -> Result<Self, SyncError>
    where
        I: IntoIterator<Item = (ObjectId, f64)>,
    {
        let mut entries = BTreeMap::new();
        for (object, velocity) in velocities {
            entries.insert(object, drift_value(velocity, measured_delay)?);
        }
        Ok(Self {
            node,
            measured_delay,
            entries,
        })
    }

    pub fn get(&self, object: ObjectId) -> Option<f64> {
        self.entries.get(&object).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (ObjectId, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Drift of every active action at every node: the outer product of the
/// action-speed vector and the per-node delay vector. Row i, column k holds
/// action i's drift at node k.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix<T: Real> {
    velocities: Vec<T>,
    delays: Vec<T>,
    cells: Vec<Vec<T>>,
}

impl<T: Real> DriftMatrix<T> {
    /// Build from the speeds of the active actions and the measured one-way
    /// delay of each node. Either vector may be empty.
    pub fn new(velocities: &[T], delays: &[T]) -> Result<Self, SyncError> {
        let mut cells = Vec::with_capacity(velocities.len());
        for &v in velocities {
            let mut row = Vec::with_capacity(delays.len());
            for &d in delays {
                row.push(drift_value(v, d)?);
            }
            cells.push(row);
        }
        Ok(Self {
            velocities: velocities.to_vec(),
            delays: delays.to_vec(),
            cells,
        })
    }

    pub fn action_count(&self) -> usize {
        self.velocities.len()
    }

    pub fn node_count(&self) -> usize {
        self.delays.len()
    }

    pub fn cell(&self, action: usize, node: usize) -> Option<T> {
        self.cells.get(action).and_then(|row| row.get(node)).copied()
    }

    /// All drift values for one node, one per active action.
    pub fn column(&self, node: usize) -> Option<Vec<T>> {
        if node >= self.delays.len() {
            return None;
        }
        Some(self.cells.iter().map(|row| row[node]).collect())
    }

    pub fn velocities(&self) -> &[T] {
        &self.velocities
    }

    pub fn delays(&self) -> &[T] {
        &self.delays
    }
}
