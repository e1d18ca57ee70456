use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Geometry and dynamics parameters of the intersection.
///
/// Car-following constants follow the common SUMO defaults (accel 2.6 m/s²,
/// decel 4.5 m/s², tau 1.0 s, length 5 m, min gap 2.5 m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoadParams {
    /// Number of incoming approaches. Even approaches (0, 2, ...) belong to
    /// the north-south signal group, odd ones to east-west.
    pub approaches: usize,
    /// Lane length in meters; the stop line sits at this position.
    pub lane_length: f64,
    /// Speed limit in m/s.
    pub v_max: f64,
    /// Maximum acceleration in m/s².
    pub accel: f64,
    /// Comfortable/maximum deceleration in m/s² (positive number).
    pub decel: f64,
    /// Driver reaction time in seconds.
    pub tau: f64,
    /// Vehicle length in meters.
    pub vehicle_length: f64,
    /// Minimum bumper-to-bumper gap in meters.
    pub min_gap: f64,
    /// Simulation time step in seconds. Must not exceed `tau`.
    pub sim_dt: f64,
    /// Duration of the amber interval between opposing greens, seconds.
    pub amber_duration: f64,
    /// Speeds below this threshold accumulate waiting time (m/s).
    pub wait_speed_threshold: f64,
}

impl Default for RoadParams {
    fn default() -> Self {
        Self {
            approaches: 4,
            lane_length: 125.0,
            v_max: 13.89,
            accel: 2.6,
            decel: 4.5,
            tau: 1.0,
            vehicle_length: 5.0,
            min_gap: 2.5,
            sim_dt: 0.5,
            amber_duration: 3.0,
            wait_speed_threshold: 0.1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("sim_dt ({dt}) must not exceed tau ({tau})")]
    DtExceedsTau { dt: f64, tau: f64 },
    #[error("approach count must be an even number >= 2, got {0}")]
    BadApproachCount(usize),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
}

impl RoadParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let positives = [
            ("lane_length", self.lane_length),
            ("v_max", self.v_max),
            ("accel", self.accel),
            ("decel", self.decel),
            ("tau", self.tau),
            ("vehicle_length", self.vehicle_length),
            ("min_gap", self.min_gap),
            ("sim_dt", self.sim_dt),
            ("amber_duration", self.amber_duration),
        ];
        for (name, value) in positives {
            if !value.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
            if value <= 0.0 {
                return Err(ParamError::NonPositive(name));
            }
        }
        if !self.wait_speed_threshold.is_finite() || self.wait_speed_threshold < 0.0 {
            return Err(ParamError::NonPositive("wait_speed_threshold"));
        }
        if self.sim_dt > self.tau {
            return Err(ParamError::DtExceedsTau {
                dt: self.sim_dt,
                tau: self.tau,
            });
        }
        if self.approaches < 2 || self.approaches % 2 != 0 {
            return Err(ParamError::BadApproachCount(self.approaches));
        }
        Ok(())
    }
}

/// Optional deviations between the nominal simulation and an evaluation
/// variant: platoon (bulk) arrivals, randomized desired speeds, and spawn
/// positions away from the lane entry.
///
/// All fields default to "off"; an all-default value leaves the simulation
/// byte-identical to an unperturbed run under the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbations {
    /// Probability that one sampled arrival expands into a platoon.
    pub bulk_prob: f64,
    /// Platoon size when a bulk arrival triggers.
    pub bulk_size: u32,
    /// Standard deviation of the truncated-normal desired speed, m/s.
    /// Zero disables speed noise entirely.
    pub speed_noise_sigma: f64,
    /// Spawn vehicles uniformly within the entry half of the lane instead of
    /// exactly at the entry.
    pub mid_lane_spawn: bool,
}

impl Default for Perturbations {
    fn default() -> Self {
        Self {
            bulk_prob: 0.0,
            bulk_size: 1,
            speed_noise_sigma: 0.0,
            mid_lane_spawn: false,
        }
    }
}

impl Perturbations {
    pub fn is_off(&self) -> bool {
        self == &Self::default()
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(0.0..=1.0).contains(&self.bulk_prob) {
            return Err(ParamError::NonFinite("bulk_prob"));
        }
        if self.bulk_size == 0 {
            return Err(ParamError::NonPositive("bulk_size"));
        }
        if !self.speed_noise_sigma.is_finite() || self.speed_noise_sigma < 0.0 {
            return Err(ParamError::NonPositive("speed_noise_sigma"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RoadParams::default().validate().unwrap();
        Perturbations::default().validate().unwrap();
        assert!(Perturbations::default().is_off());
    }

    #[test]
    fn rejects_dt_above_tau() {
        let params = RoadParams {
            sim_dt: 1.5,
            ..RoadParams::default()
        };
        assert_eq!(
            params.validate(),
            Err(ParamError::DtExceedsTau { dt: 1.5, tau: 1.0 })
        );
    }

    #[test]
    fn rejects_non_positive_fields() {
        let params = RoadParams {
            v_max: 0.0,
            ..RoadParams::default()
        };
        assert_eq!(params.validate(), Err(ParamError::NonPositive("v_max")));
    }

    #[test]
    fn rejects_odd_approach_count() {
        let params = RoadParams {
            approaches: 3,
            ..RoadParams::default()
        };
        assert_eq!(params.validate(), Err(ParamError::BadApproachCount(3)));
    }
}
