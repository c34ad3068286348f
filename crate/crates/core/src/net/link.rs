use crate::net::NetError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random spread added to a link's base delay, per message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jitter {
    None,
    /// Uniform on \[-half_width, +half_width\] seconds.
    Uniform { half_width: f64 },
    /// Normal with the given deviation, truncated at three deviations.
    Gaussian { sigma: f64 },
}

/// One-way transmission characteristics of a directed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub base_delay: f64,
    pub jitter: Jitter,
    pub seed: u64,
}

impl LinkModel {
    pub fn fixed(base_delay: f64) -> Self {
        Self {
            base_delay,
            jitter: Jitter::None,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), NetError> {
        if !self.base_delay.is_finite() || self.base_delay < 0.0 {
            return Err(NetError::BadLink {
                what: "base delay must be finite and non-negative",
            });
        }
        let spread = match self.jitter {
            Jitter::None => 0.0,
            Jitter::Uniform { half_width } => half_width,
            Jitter::Gaussian { sigma } => sigma,
        };
        if !spread.is_finite() || spread < 0.0 {
            return Err(NetError::BadLink {
                what: "jitter spread must be finite and non-negative",
            });
        }
        Ok(())
    }
}

/// A live directed link: the model plus its random stream and the FIFO
/// delivery horizon.
///
/// Jitter is produced by drawing a unit-scale variate and multiplying by the
/// configured spread, so two links with equal seeds draw proportional jitter
/// sequences regardless of their spreads.
#[derive(Debug, Clone)]
pub struct Link {
    model: LinkModel,
    rng: ChaCha8Rng,
    last_delivery: f64,
}

impl Link {
    pub fn new(model: LinkModel) -> Result<Self, NetError> {
        model.validate()?;
        Ok(Self {
            model,
            rng: ChaCha8Rng::seed_from_u64(model.seed),
            last_delivery: 0.0,
        })
    }

    pub fn model(&self) -> &LinkModel {
        &self.model
    }

    /// Change the base delay mid-run; jitter and the random stream continue
    /// unaffected.
    pub fn set_base_delay(&mut self, base_delay: f64) -> Result<(), NetError> {
        let next = LinkModel {
            base_delay,
            ..self.model
        };
        next.validate()?;
        self.model = next;
        Ok(())
    }

    fn jitter_sample(&mut self) -> f64 {
        match self.model.jitter {
            Jitter::None => 0.0,
            Jitter::Uniform { half_width } => {
                let unit: f64 = self.rng.random_range(-1.0..=1.0);
                unit * half_width
            }
            Jitter::Gaussian { sigma } => {
                let unit: f64 = self.rng.sample(StandardNormal);
                unit.clamp(-3.0, 3.0) * sigma
            }
        }
    }

    /// One-way latency for the next message; never negative.
    pub fn sample_delay(&mut self) -> f64 {
        (self.model.base_delay + self.jitter_sample()).max(0.0)
    }

    /// Delivery instant for a message sent at `send_time`. Deliveries on a
    /// link never reorder: a later send with a luckier jitter draw still
    /// arrives no earlier than the send before it.
    pub fn delivery_time(&mut self, send_time: f64) -> f64 {
        let arrival = (send_time + self.sample_delay()).max(self.last_delivery);
        self.last_delivery = arrival;
        arrival
    }
}
