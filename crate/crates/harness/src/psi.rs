use crate::report::DriftSample;
use crate::HarnessError;
use scenesync_core::scene::NodeId;
use std::collections::BTreeMap;

/// How mean drift responds to adding client nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalability {
    /// Drift stays near the single-client level: replication scales.
    High,
    /// Drift grows with the node count.
    Low,
}

/// Mean drift per client count, with the growth ratio between the largest
/// and the single-client run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityReport {
    /// psi keyed by client count: the mean over client nodes of each node's
    /// mean drift angle, degrees.
    pub psi: BTreeMap<usize, f64>,
    /// psi_n / psi_1 for the largest n present.
    pub ratio: f64,
    pub verdict: Scalability,
}

/// Growth tolerated before a run stops counting as scalable: adding nodes
/// may raise mean drift by at most half the single-client figure.
const HIGH_SCALABILITY_RATIO: f64 = 1.5;

/// Collapse one run's samples to (client count, psi).
pub fn psi_from_samples(samples: &[DriftSample]) -> Result<(usize, f64), HarnessError> {
    if samples.is_empty() {
        return Err(HarnessError::Validation {
            what: "cannot compute psi over zero samples".into(),
        });
    }
    let mut per_node: BTreeMap<NodeId, (f64, usize)> = BTreeMap::new();
    for s in samples {
        let slot = per_node.entry(s.node).or_insert((0.0, 0));
        slot.0 += s.alpha_deg;
        slot.1 += 1;
    }
    let node_means: Vec<f64> = per_node
        .values()
        .map(|&(sum, count)| sum / count as f64)
        .collect();
    let psi = node_means.iter().sum::<f64>() / node_means.len() as f64;
    Ok((per_node.len(), psi))
}

/// Combine several runs of the same scenario at different node counts into
/// one report. Exactly one run per client count, and a single-client run
/// must be present to anchor the ratio.
pub fn scalability(runs: &[Vec<DriftSample>]) -> Result<ScalabilityReport, HarnessError> {
    let mut psi = BTreeMap::new();
    for samples in runs {
        let (clients, value) = psi_from_samples(samples)?;
        if psi.insert(clients, value).is_some() {
            return Err(HarnessError::Validation {
                what: format!("two runs with {clients} client nodes"),
            });
        }
    }
    let Some(&psi_1) = psi.get(&1) else {
        return Err(HarnessError::Validation {
            what: "a single-client run is required to anchor the ratio".into(),
        });
    };
    if psi_1 <= 0.0 {
        return Err(HarnessError::Validation {
            what: "single-client drift is zero; the ratio is undefined".into(),
        });
    }
    let (_, &psi_n) = psi.iter().next_back().expect("non-empty");
    let ratio = psi_n / psi_1;
    let verdict = if ratio <= HIGH_SCALABILITY_RATIO {
        Scalability::High
    } else {
        Scalability::Low
    };
    Ok(ScalabilityReport {
        psi,
        ratio,
        verdict,
    })
}
