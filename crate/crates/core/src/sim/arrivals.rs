use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arrival rate of one approach, either constant or a 24-entry hourly table
/// keyed by time of day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateProfile {
    Constant(f64),
    Hourly(Vec<f64>),
}

impl RateProfile {
    /// Rate in vehicles/second at the given clock (seconds since scenario
    /// midnight). Hourly tables are piecewise constant; negative entries
    /// clamp to zero.
    pub fn rate_at(&self, clock: f64) -> f64 {
        let raw = match self {
            RateProfile::Constant(rate) => *rate,
            RateProfile::Hourly(table) => {
                let hour = ((clock / 3600.0).floor() as i64).rem_euclid(24) as usize;
                table[hour]
            }
        };
        raw.max(0.0)
    }

    pub fn scaled(&self, factor: f64) -> RateProfile {
        match self {
            RateProfile::Constant(rate) => RateProfile::Constant(rate * factor),
            RateProfile::Hourly(table) => {
                RateProfile::Hourly(table.iter().map(|r| r * factor).collect())
            }
        }
    }

    pub fn max_rate(&self) -> f64 {
        match self {
            RateProfile::Constant(rate) => *rate,
            RateProfile::Hourly(table) => table.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Demand description: one rate profile per approach plus the probability
/// that a spawned vehicle is visible to the controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSpec {
    pub rates: Vec<RateProfile>,
    pub detection_rate: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ArrivalSpecError {
    #[error("expected {expected} rate profiles (one per approach), got {got}")]
    WrongApproachCount { expected: usize, got: usize },
    #[error("hourly rate table must have 24 entries, got {0}")]
    BadHourlyLen(usize),
    #[error("arrival rate must be finite and non-negative, got {0}")]
    BadRate(f64),
    #[error("detection rate must lie in [0, 1], got {0}")]
    BadDetectionRate(f64),
}

impl ArrivalSpec {
    pub fn validate(&self, approaches: usize) -> Result<(), ArrivalSpecError> {
        if self.rates.len() != approaches {
            return Err(ArrivalSpecError::WrongApproachCount {
                expected: approaches,
                got: self.rates.len(),
            });
        }
        for profile in &self.rates {
            match profile {
                RateProfile::Constant(rate) => {
                    if !rate.is_finite() || *rate < 0.0 {
                        return Err(ArrivalSpecError::BadRate(*rate));
                    }
                }
                RateProfile::Hourly(table) => {
                    if table.len() != 24 {
                        return Err(ArrivalSpecError::BadHourlyLen(table.len()));
                    }
                    for rate in table {
                        if !rate.is_finite() || *rate < 0.0 {
                            return Err(ArrivalSpecError::BadRate(*rate));
                        }
                    }
                }
            }
        }
        if !(0.0..=1.0).contains(&self.detection_rate) {
            return Err(ArrivalSpecError::BadDetectionRate(self.detection_rate));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> ArrivalSpec {
        ArrivalSpec {
            rates: self.rates.iter().map(|p| p.scaled(factor)).collect(),
            detection_rate: self.detection_rate,
        }
    }
}

/// A sampled arrival that has not yet entered the lane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub approach: usize,
    pub detected: bool,
}

/// Samples this step's arrivals: per approach the count is
/// Poisson(rate(clock) * dt) and each vehicle's visibility is an independent
/// Bernoulli(detection_rate) draw.
pub fn generate_arrivals<R: Rng>(
    spec: &ArrivalSpec,
    clock: f64,
    dt: f64,
    rng: &mut R,
) -> Vec<Arrival> {
    debug_assert!(dt > 0.0);
    let mut out = Vec::new();
    for (approach, profile) in spec.rates.iter().enumerate() {
        let lambda = profile.rate_at(clock) * dt;
        if lambda <= 0.0 {
            continue;
        }
        let count = Poisson::new(lambda).expect("lambda > 0").sample(rng) as u64;
        for _ in 0..count {
            let detected = rng.gen::<f64>() < spec.detection_rate;
            out.push(Arrival { approach, detected });
        }
    }
    out
}
