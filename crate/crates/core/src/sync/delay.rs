use crate::sync::SyncError;
use std::collections::VecDeque;

/// One-way delay estimated from a measured round trip, assuming the two
/// directions split it evenly.
pub fn rtt_to_delay(rtt: f64) -> Result<f64, SyncError> {
    if !rtt.is_finite() {
        return Err(SyncError::NonFinite { what: "round-trip time" });
    }
    if rtt < 0.0 {
        return Err(SyncError::NegativeDelay { delay: rtt });
    }
    Ok(rtt * 0.5)
}

/// Bounds and step factor for the adaptive probe rate, in probes per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRateConfig {
    /// Rate used until enough history exists to adapt.
    pub gamma_start: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    /// Multiplier applied on each adaptation step; the rate divides by this
    /// when the network looks steady and multiplies by it when it shifts.
    pub factor: f64,
}

impl Default for ProbeRateConfig {
    fn default() -> Self {
        Self {
            gamma_start: 1.0,
            gamma_min: 0.2,
            gamma_max: 20.0,
            factor: 2.0,
        }
    }
}

impl ProbeRateConfig {
    pub fn validate(&self) -> Result<(), SyncError> {
        let all = [
            ("starting probe rate", self.gamma_start),
            ("minimum probe rate", self.gamma_min),
            ("maximum probe rate", self.gamma_max),
        ];
        for (what, v) in all {
            if !v.is_finite() || v <= 0.0 {
                return Err(SyncError::BadProbeConfig { what });
            }
        }
        if self.gamma_min > self.gamma_max {
            return Err(SyncError::BadProbeConfig {
                what: "minimum probe rate exceeds maximum",
            });
        }
        if self.gamma_start < self.gamma_min || self.gamma_start > self.gamma_max {
            return Err(SyncError::BadProbeConfig {
                what: "starting probe rate outside bounds",
            });
        }
        if !self.factor.is_finite() || self.factor <= 1.0 {
            return Err(SyncError::BadProbeConfig {
                what: "step factor must exceed 1",
            });
        }
        Ok(())
    }
}

/// Deviations below one nanosecond are clock resolution noise, not network
/// change, and must never drive the rate; without this floor a perfectly
/// steady link looks unstable whenever its samples differ in the last bit.
const BAND_FLOOR: f64 = 1e-9;

/// One adaptation step, reported for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDecision {
    pub sample: f64,
    pub mean: f64,
    pub sigma: f64,
    /// Whether the sample sat within one standard deviation of the mean
    /// (never narrower than the measurement resolution).
    pub in_band: bool,
    pub gamma_before: f64,
    pub gamma_after: f64,
}

/// Sliding window of one-way delay samples driving the probe rate.
///
/// The window keeps the most recent `capacity` samples with their mean and
/// population standard deviation. Once the window is full, each new sample
/// is judged against the band of one standard deviation around the mean
/// (widened to the measurement resolution when the deviation is smaller):
/// samples inside the band slow probing down (the network is steady),
/// samples outside speed it up (something changed and the estimate is
/// stale). The rate stays within the configured bounds.
#[derive(Debug, Clone)]
pub struct DelayHistory {
    samples: VecDeque<f64>,
    capacity: usize,
    mean: f64,
    sigma: f64,
    gamma: f64,
    config: ProbeRateConfig,
}

impl DelayHistory {
    pub fn new(capacity: usize, config: ProbeRateConfig) -> Result<Self, SyncError> {
        if capacity == 0 {
            return Err(SyncError::BadProbeConfig {
                what: "history capacity must be positive",
            });
        }
        config.validate()?;
        Ok(Self {
            samples: VecDeque::with_capacity(capacity),
            capacity,
            mean: 0.0,
            sigma: 0.0,
            gamma: config.gamma_start,
            config,
        })
    }

    /// Add a one-way delay sample, evicting the oldest once full.
    pub fn record(&mut self, delay: f64) -> Result<(), SyncError> {
        if !delay.is_finite() {
            return Err(SyncError::NonFinite { what: "delay sample" });
        }
        if delay < 0.0 {
            return Err(SyncError::NegativeDelay { delay });
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(delay);
        self.recompute();
        Ok(())
    }

    fn recompute(&mut self) {
        let n = self.samples.len() as f64;
        self.mean = self.samples.iter().sum::<f64>() / n;
        let var = self
            .samples
            .iter()
            .map(|&x| {
                let d = x - self.mean;
                d * d
            })
            .sum::<f64>()
            / n;
        self.sigma = var.sqrt();
    }

    /// Adjust the probe rate based on where `sample` falls relative to the
    /// window statistics. Does nothing until the window is full.
    pub fn adapt_rate(&mut self, sample: f64) -> Option<RateDecision> {
        if !self.is_warm() {
            return None;
        }
        let in_band = (sample - self.mean).abs() <= self.sigma.max(BAND_FLOOR);
        let before = self.gamma;
        self.gamma = if in_band {
            (self.gamma / self.config.factor).max(self.config.gamma_min)
        } else {
            (self.gamma * self.config.factor).min(self.config.gamma_max)
        };
        Some(RateDecision {
            sample,
            mean: self.mean,
            sigma: self.sigma,
            in_band,
            gamma_before: before,
            gamma_after: self.gamma,
        })
    }

    pub fn is_warm(&self) -> bool {
        self.samples.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Current probe rate, probes per second.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Seconds between probes at the current rate.
    pub fn interval(&self) -> f64 {
        1.0 / self.gamma
    }

    pub fn config(&self) -> &ProbeRateConfig {
        &self.config
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn history(capacity: usize) -> DelayHistory {
        DelayHistory::new(capacity, ProbeRateConfig::default()).unwrap()
    }

    #[test]
    fn half_round_trip() {
        assert_eq!(rtt_to_delay(0.004).unwrap(), 0.002);
        assert_eq!(rtt_to_delay(0.0).unwrap(), 0.0);
        assert!(rtt_to_delay(-0.001).is_err());
        assert!(rtt_to_delay(f64::NAN).is_err());
    }

    #[test]
    fn mean_and_population_deviation() {
        let mut h = history(3);
        for d in [0.001, 0.002, 0.003] {
            h.record(d).unwrap();
        }
        assert_eq!(h.mean(), 0.002);
        assert!((h.sigma() - 8.164_965_809_277_26e-4).abs() < 1e-15);
        assert!(h.is_warm());
    }

    #[test]
    fn eviction_keeps_most_recent() {
        let mut h = history(3);
        for d in [0.010, 0.001, 0.002, 0.003] {
            h.record(d).unwrap();
        }
        assert_eq!(h.len(), 3);
        assert_eq!(h.mean(), 0.002);
    }

    #[test]
    fn statistics_match_brute_force_over_random_stream() {
        let mut rng = StdRng::seed_from_u64(0x5eed_0002);
        let mut h = history(32);
        let mut shadow: Vec<f64> = Vec::new();
        for _ in 0..500 {
            let d = rng.random_range(0.0..0.05);
            h.record(d).unwrap();
            shadow.push(d);
            let window: Vec<f64> = shadow
                .iter()
                .rev()
                .take(32)
                .copied()
                .collect();
            let n = window.len() as f64;
            let mean = window.iter().sum::<f64>() / n;
            let var = window.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
            assert!((h.mean() - mean).abs() < 1e-12);
            assert!((h.sigma() - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn no_adaptation_until_window_full() {
        let mut h = history(4);
        h.record(0.001).unwrap();
        assert_eq!(h.adapt_rate(0.001), None);
        assert_eq!(h.gamma(), 1.0);
    }

    #[test]
    fn steady_samples_slow_probing_to_the_floor() {
        let mut h = history(3);
        for _ in 0..3 {
            h.record(0.002).unwrap();
        }
        // Constant window: deviation is zero, an equal sample is in band.
        let gammas: Vec<f64> = (0..3)
            .map(|_| {
                h.record(0.002).unwrap();
                h.adapt_rate(0.002).unwrap().gamma_after
            })
            .collect();
        assert_eq!(gammas, vec![0.5, 0.25, 0.2]);
        assert_eq!(h.interval(), 5.0);
    }

    #[test]
    fn shifted_samples_speed_probing_to_the_ceiling() {
        let mut h = history(100);
        for _ in 0..100 {
            h.record(0.0015).unwrap();
        }
        let mut ups = 0;
        let mut peak: f64 = 0.0;
        let mut last = None;
        for _ in 0..60 {
            h.record(0.005).unwrap();
            let d = h.adapt_rate(0.005).unwrap();
            if !d.in_band {
                ups += 1;
            }
            peak = peak.max(d.gamma_after);
            last = Some(d);
        }
        // The shifted level stays outside the band until it fills half the
        // window (at exactly half, deviation equals sigma and the band is
        // inclusive). Probing pins at the ceiling during the transient and
        // relaxes back to the floor once the window absorbs the new level.
        assert_eq!(ups, 49);
        assert_eq!(peak, 20.0);
        assert!(last.unwrap().in_band);
        assert_eq!(h.gamma(), 0.2);
    }

    #[test]
    fn rate_doubles_once_per_shifted_sample() {
        let mut h = DelayHistory::new(
            100,
            ProbeRateConfig {
                gamma_start: 0.2,
                ..ProbeRateConfig::default()
            },
        )
        .unwrap();
        for _ in 0..100 {
            h.record(0.0015).unwrap();
        }
        let mut doublings = 0;
        for _ in 0..10 {
            h.record(0.005).unwrap();
            let d = h.adapt_rate(0.005).unwrap();
            assert!(!d.in_band);
            if d.gamma_after > d.gamma_before {
                doublings += 1;
            }
        }
        // 0.2 -> 0.4 -> 0.8 -> 1.6 -> 3.2 -> 6.4 -> 12.8 -> 20 (capped).
        assert_eq!(doublings, 7);
        assert_eq!(h.gamma(), 20.0);
    }

    #[test]
    fn zero_deviation_band_admits_only_resolution_noise() {
        let mut h = history(3);
        for _ in 0..3 {
            h.record(0.002).unwrap();
        }
        assert_eq!(h.sigma(), 0.0);
        assert!(h.adapt_rate(0.002).unwrap().in_band);
        assert!(h.adapt_rate(0.002 + 5e-10).unwrap().in_band);
        assert!(!h.adapt_rate(0.002 + 1e-6).unwrap().in_band);
    }

    #[test]
    fn config_validation() {
        assert!(ProbeRateConfig::default().validate().is_ok());
        let bad = ProbeRateConfig {
            gamma_min: 30.0,
            ..ProbeRateConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ProbeRateConfig {
            gamma_start: 0.1,
            ..ProbeRateConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ProbeRateConfig {
            factor: 1.0,
            ..ProbeRateConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ProbeRateConfig {
            gamma_max: f64::INFINITY,
            ..ProbeRateConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(DelayHistory::new(0, ProbeRateConfig::default()).is_err());
    }

    #[test]
    fn bad_samples_rejected() {
        let mut h = history(3);
        assert!(h.record(-0.001).is_err());
        assert!(h.record(f64::NAN).is_err());
        assert!(h.is_empty());
    }
}
