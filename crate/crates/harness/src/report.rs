use crate::HarnessError;
use scenesync_core::scene::NodeId;
use std::path::Path;

/// Orientation gap between server and one client, captured at an action
/// initiation instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSample {
    /// 1-based action ordinal within its velocity block.
    pub sample_index: u32,
    pub node: NodeId,
    pub velocity_dps: f64,
    pub alpha_deg: f64,
    pub virtual_time_s: f64,
}

/// One probe measurement with the window statistics and rate after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub time_s: f64,
    /// Latest one-way delay sample.
    pub h0_s: f64,
    pub h_mean_s: f64,
    pub sigma_s: f64,
    /// Probe rate in effect after this measurement, probes per second.
    pub gamma0_per_s: f64,
}

pub const DRIFT_HEADER: &str = "sample_index,node_id,velocity_dps,alpha_deg,virtual_time_s";
pub const PROBE_HEADER: &str = "time_s,h0_s,h_mean_s,sigma_s,gamma0_per_s";

pub fn drift_csv(samples: &[DriftSample]) -> String {
    let mut out = String::from(DRIFT_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.sample_index, s.node.0, s.velocity_dps, s.alpha_deg, s.virtual_time_s
        ));
    }
    out
}

pub fn probe_csv(points: &[ProbePoint]) -> String {
    let mut out = String::from(PROBE_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.time_s, p.h0_s, p.h_mean_s, p.sigma_s, p.gamma0_per_s
        ));
    }
    out
}

/// Ordered key = value lines.
pub fn summary_text(entries: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

pub fn parse_drift_csv(text: &str) -> Result<Vec<DriftSample>, HarnessError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == DRIFT_HEADER => {}
        other => {
            return Err(HarnessError::BadCsv {
                line: 1,
                what: format!(
                    "expected header '{DRIFT_HEADER}', got '{}'",
                    other.unwrap_or_default()
                ),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, row) in lines.enumerate() {
        let line = idx + 2;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(HarnessError::BadCsv {
                line,
                what: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| HarnessError::BadCsv {
            line,
            what: what.into(),
        };
        out.push(DriftSample {
            sample_index: fields[0].trim().parse().map_err(|_| bad("sample_index"))?,
            node: NodeId(fields[1].trim().parse().map_err(|_| bad("node_id"))?),
            velocity_dps: fields[2].trim().parse().map_err(|_| bad("velocity_dps"))?,
            alpha_deg: fields[3].trim().parse().map_err(|_| bad("alpha_deg"))?,
            virtual_time_s: fields[4]
                .trim()
                .parse()
                .map_err(|_| bad("virtual_time_s"))?,
        });
    }
    Ok(out)
}

pub fn read_drift_csv(path: &Path) -> Result<Vec<DriftSample>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Validation {
        what: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_drift_csv(&text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}
