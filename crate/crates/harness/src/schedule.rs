use crate::config::ScenarioConfig;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scenesync_core::scene::{ActionId, ActionTrace, NodeId, ObjectId, TraceEntry};
use scenesync_core::seedstream::derive_seed;
use scenesync_core::{Motiond, Vec3d};

/// Seed stream id for schedule draws; links use their own ids.
const SCHEDULE_STREAM: u64 = 1;

/// One scripted rotation: a signed coordinate axis, a block speed, and a
/// start/duration pair. Actions within a block run back to back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledAction {
    /// 1-based position within the velocity block.
    pub index: u32,
    pub velocity_dps: f64,
    /// Signed unit axis (one of the six coordinate directions).
    pub axis: Vec3d,
    pub start_s: f64,
    pub duration_s: f64,
}

impl ScheduledAction {
    pub fn motion(&self) -> Motiond {
        Motiond::rotation(self.axis, self.velocity_dps).expect("axis is unit, speed positive")
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

/// Script the whole run: for each configured speed, `actions_per_velocity`
/// rotations about a random signed coordinate axis with a random duration.
///
/// Consecutive actions within a block always differ in axis or sign, so
/// every initiation is a real change. Axis, sign, and duration draws do not
/// depend on the speed values, so two configs differing only in speeds and
/// delays script identical shapes from the same seed.
pub fn build_rotation_schedule(cfg: &ScenarioConfig, start_s: f64) -> Vec<ScheduledAction> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SCHEDULE_STREAM));
    let mut out = Vec::with_capacity(cfg.velocities_dps.len() * cfg.actions_per_velocity as usize);
    let mut t = start_s;
    for &velocity in &cfg.velocities_dps {
        let mut prev: Option<(usize, bool)> = None;
        for index in 1..=cfg.actions_per_velocity {
            let pick = loop {
                let pick = (rng.random_range(0..3usize), rng.random_bool(0.5));
                if prev != Some(pick) {
                    break pick;
                }
            };
            prev = Some(pick);
            let duration = rng.random_range(cfg.duration_min_s..=cfg.duration_max_s);
            out.push(ScheduledAction {
                index,
                velocity_dps: velocity,
                axis: signed_axis(pick.0, pick.1),
                start_s: t,
                duration_s: duration,
            });
            t += duration;
        }
    }
    out
}

fn signed_axis(index: usize, negative: bool) -> Vec3d {
    let axis = match index {
        0 => Vec3d::unit_x(),
        1 => Vec3d::unit_y(),
        _ => Vec3d::unit_z(),
    };
    if negative {
        axis.scaled(-1.0)
    } else {
        axis
    }
}

/// The schedule as an initiation trace attributed to `node`, for tempo
/// classification before anything runs.
pub fn trace_from_schedule(
    schedule: &[ScheduledAction],
    node: NodeId,
    object: ObjectId,
) -> ActionTrace {
    let mut trace = ActionTrace::new();
    for (ordinal, action) in schedule.iter().enumerate() {
        trace.record(TraceEntry {
            action: ActionId(ordinal as u32 + 1),
            object,
            node,
            time: action.start_s,
        });
    }
    trace
}
