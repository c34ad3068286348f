use crate::HarnessError;
use scenesync_core::net::Jitter;
use scenesync_core::runtime::ProbeMode;
use scenesync_core::sync::ProbeRateConfig;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Everything a scenario run needs, read from a flat `key = value` file.
///
/// Lines starting with `#` and blank lines are ignored; `#` also starts a
/// trailing comment. Every key is optional except `seed`: runs must be
/// reproducible, so there is no wall-clock fallback. Unknown and repeated
/// keys are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Total participants, server included.
    pub nodes: u32,
    /// One-way link delay, seconds.
    pub base_delay_s: f64,
    pub jitter: Jitter,
    /// Angular speeds exercised in order, degrees per second.
    pub velocities_dps: Vec<f64>,
    /// Scripted rotations per speed.
    pub actions_per_velocity: u32,
    /// Uniform bounds for each action's duration, seconds.
    pub duration_min_s: f64,
    pub duration_max_s: f64,
    pub sync_enabled: bool,
    pub probe_mode: ProbeMode,
    /// Render period, seconds.
    pub frame_s: f64,
    /// Delay samples kept for probe-rate adaptation.
    pub probe_window: usize,
    /// Back-to-back probes fired right after joining.
    pub boot_probes: usize,
    pub gamma_start: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub seed: u64,
    /// Probe demo length, virtual seconds.
    pub duration_s: f64,
    /// Optional mid-demo delay change: (when, new one-way delay).
    pub delay_step: Option<(f64, f64)>,
    /// Directory reports are written into.
    pub out: PathBuf,
}

impl ScenarioConfig {
    /// Parse from file contents. `seed` must be present.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut seen = BTreeSet::new();
        let mut nodes = 2u32;
        let mut base_delay_s = 0.005;
        let mut jitter = Jitter::None;
        let mut velocities_dps = vec![10.0, 50.0, 100.0];
        let mut actions_per_velocity = 24u32;
        let mut duration_min_s = 0.25;
        let mut duration_max_s = 2.0;
        let mut sync_enabled = true;
        let mut probe_mode = ProbeMode::Adaptive;
        let mut frame_s = 1.0 / 60.0;
        let mut probe_window = 100usize;
        let mut boot_probes = 5usize;
        let mut gamma_start = 1.0;
        let mut gamma_min = 0.2;
        let mut gamma_max = 20.0;
        let mut seed: Option<u64> = None;
        let mut duration_s = 60.0;
        let mut step_time_s: Option<f64> = None;
        let mut step_delay_s: Option<f64> = None;
        let mut out = PathBuf::from("results");

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(HarnessError::Config {
                    line,
                    what: "expected key = value".into(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(HarnessError::Config {
                    line,
                    what: format!("repeated key '{key}'"),
                });
            }
            let bad = |what: String| HarnessError::Config { line, what };
            match key {
                "nodes" => nodes = parse_num(value, key, line)?,
                "base_delay_s" => base_delay_s = parse_num(value, key, line)?,
                "jitter" => jitter = parse_jitter(value, line)?,
                "velocities_dps" => {
                    velocities_dps = value
                        .split(',')
                        .map(|v| parse_num(v.trim(), key, line))
                        .collect::<Result<_, _>>()?;
                }
                "actions_per_velocity" => actions_per_velocity = parse_num(value, key, line)?,
                "duration_min_s" => duration_min_s = parse_num(value, key, line)?,
                "duration_max_s" => duration_max_s = parse_num(value, key, line)?,
                "sync" => {
                    sync_enabled = match value {
                        "on" => true,
                        "off" => false,
                        other => return Err(bad(format!("sync must be on or off, got '{other}'"))),
                    }
                }
                "probe_mode" => {
                    probe_mode = match value {
                        "adaptive" => ProbeMode::Adaptive,
                        "fixed" => ProbeMode::Fixed,
                        other => {
                            return Err(bad(format!(
                                "probe_mode must be adaptive or fixed, got '{other}'"
                            )))
                        }
                    }
                }
                "frame_s" => frame_s = parse_num(value, key, line)?,
                "probe_window" => probe_window = parse_num(value, key, line)?,
                "boot_probes" => boot_probes = parse_num(value, key, line)?,
                "gamma_start" => gamma_start = parse_num(value, key, line)?,
                "gamma_min" => gamma_min = parse_num(value, key, line)?,
                "gamma_max" => gamma_max = parse_num(value, key, line)?,
                "seed" => seed = Some(parse_num(value, key, line)?),
                "duration_s" => duration_s = parse_num(value, key, line)?,
                "step_time_s" => step_time_s = Some(parse_num(value, key, line)?),
                "step_delay_s" => step_delay_s = Some(parse_num(value, key, line)?),
                "out" => out = PathBuf::from(value),
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }

        let seed = seed.ok_or(HarnessError::Config {
            line: 0,
            what: "missing required key 'seed'".into(),
        })?;
        let delay_step = match (step_time_s, step_delay_s) {
            (Some(t), Some(d)) => Some((t, d)),
            (None, None) => None,
            _ => {
                return Err(HarnessError::Config {
                    line: 0,
                    what: "step_time_s and step_delay_s must be given together".into(),
                })
            }
        };

        let cfg = Self {
            nodes,
            base_delay_s,
            jitter,
            velocities_dps,
            actions_per_velocity,
            duration_min_s,
            duration_max_s,
            sync_enabled,
            probe_mode,
            frame_s,
            probe_window,
            boot_probes,
            gamma_start,
            gamma_min,
            gamma_max,
            seed,
            duration_s,
            delay_step,
            out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Validation {
            what: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |what: String| Err(HarnessError::Validation { what });
        if self.nodes < 2 {
            return fail(format!("nodes must be at least 2, got {}", self.nodes));
        }
        if !(self.base_delay_s.is_finite() && self.base_delay_s > 0.0) {
            return fail(format!(
                "base_delay_s must be positive, got {}",
                self.base_delay_s
            ));
        }
        if self.velocities_dps.is_empty() {
            return fail("velocities_dps must not be empty".into());
        }
        for &v in &self.velocities_dps {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("velocities must be positive, got {v}"));
            }
        }
        if self.actions_per_velocity == 0 {
            return fail("actions_per_velocity must be positive".into());
        }
        if !(self.duration_min_s.is_finite() && self.duration_min_s > 0.0) {
            return fail(format!(
                "duration_min_s must be positive, got {}",
                self.duration_min_s
            ));
        }
        if !(self.duration_max_s.is_finite() && self.duration_max_s >= self.duration_min_s) {
            return fail(format!(
                "duration_max_s must be at least duration_min_s, got {}",
                self.duration_max_s
            ));
        }
        if !(self.frame_s.is_finite() && self.frame_s > 0.0) {
            return fail(format!("frame_s must be positive, got {}", self.frame_s));
        }
        if self.probe_window == 0 {
            return fail("probe_window must be positive".into());
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return fail(format!(
                "duration_s must be positive, got {}",
                self.duration_s
            ));
        }
        if let Some((t, d)) = self.delay_step {
            if !(t.is_finite() && t > 0.0 && t < self.duration_s) {
                return fail(format!(
                    "step_time_s must fall inside the demo duration, got {t}"
                ));
            }
            if !(d.is_finite() && d > 0.0) {
                return fail(format!("step_delay_s must be positive, got {d}"));
            }
        }
        match self.jitter {
            Jitter::None => {}
            Jitter::Uniform { half_width } => {
                if !(half_width.is_finite() && half_width >= 0.0) {
                    return fail(format!(
                        "uniform jitter half-width must be non-negative, got {half_width}"
                    ));
                }
            }
            Jitter::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return fail(format!(
                        "gaussian jitter sigma must be non-negative, got {sigma}"
                    ));
                }
            }
        }
        self.probe_rate().validate().map_err(|e| {
            HarnessError::Validation {
                what: format!("probe rate bounds: {e}"),
            }
        })?;
        Ok(())
    }

    pub fn probe_rate(&self) -> ProbeRateConfig {
        ProbeRateConfig {
            gamma_start: self.gamma_start,
            gamma_min: self.gamma_min,
            gamma_max: self.gamma_max,
            ..ProbeRateConfig::default()
        }
    }

    pub fn client_count(&self) -> u32 {
        self.nodes - 1
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, HarnessError> {
    value.parse().map_err(|_| HarnessError::Config {
        line,
        what: format!("could not parse '{value}' for key '{key}'"),
    })
}

fn parse_jitter(value: &str, line: usize) -> Result<Jitter, HarnessError> {
    if value == "none" {
        return Ok(Jitter::None);
    }
    let bad = || HarnessError::Config {
        line,
        what: format!("jitter must be none, uniform:<s> or gaussian:<s>, got '{value}'"),
    };
    let (kind, amount) = value.split_once(':').ok_or_else(bad)?;
    let amount: f64 = amount.trim().parse().map_err(|_| bad())?;
    match kind.trim() {
        "uniform" => Ok(Jitter::Uniform {
            half_width: amount,
        }),
        "gaussian" => Ok(Jitter::Gaussian { sigma: amount }),
        _ => Err(bad()),
    }
}
