use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use super::arrivals::{generate_arrivals, Arrival, ArrivalSpec};
use super::params::{Perturbations, RoadParams};
use super::signal::{Action, PhaseId, SignalPhase};
use super::vehicle::{Trip, Vehicle};

/// Krauss-style safe speed toward a leader `gap` meters ahead moving at
/// `leader_speed`: the fastest speed from which the follower can still avoid
/// a collision if the leader brakes at full deceleration after one reaction
/// time.
fn safe_speed(gap: f64, leader_speed: f64, params: &RoadParams) -> f64 {
    let bt = params.decel * params.tau;
    -bt + (bt * bt + leader_speed * leader_speed + 2.0 * params.decel * gap).sqrt()
}

/// Target speed for the next step: accelerate toward the limit, capped by the
/// safe speed for the current gap. Never negative. A red or amber signal is
/// handled by the caller as a stationary leader at the stop line.
pub fn compute_target_speed(v: f64, gap: f64, leader_speed: f64, params: &RoadParams) -> f64 {
    debug_assert!(gap >= 0.0);
    (v + params.accel * params.sim_dt)
        .min(params.v_max)
        .min(safe_speed(gap, leader_speed, params))
        .max(0.0)
}

/// Instantaneous penalty of one vehicle: (v_max - v) / v_max, in [0, 1].
fn vehicle_penalty(speed: f64, v_max: f64) -> f64 {
    (v_max - speed) / v_max
}

/// Mean over all present vehicles of -(v_max - v) / v_max; zero when the
/// intersection is empty. Always in [-1, 0].
pub fn step_reward(world: &World) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for lane in &world.lanes {
        for vehicle in lane {
            sum += vehicle_penalty(vehicle.speed, world.params.v_max);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        -sum / count as f64
    }
}

/// Controller-visible measurement: only detected vehicles contribute.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDetection {
    /// Detected vehicles per approach.
    pub detected_counts: Vec<u32>,
    /// Distance from the stop line to the nearest detected vehicle per
    /// approach; lane length when no detected vehicle is present.
    pub nearest_detected_distance: Vec<f64>,
    pub phase: SignalPhase,
    pub amber: bool,
    /// Seconds since scenario midnight.
    pub clock: f64,
}

/// Reads the detector state from the world. Undetected vehicles never
/// influence any field.
pub fn measure_state(world: &World) -> RawDetection {
    let n = world.params.approaches;
    let mut counts = vec![0u32; n];
    let mut distances = vec![world.params.lane_length; n];
    for (approach, lane) in world.lanes.iter().enumerate() {
        let mut nearest: Option<f64> = None;
        for vehicle in lane {
            if vehicle.detected {
                counts[approach] += 1;
                // Lanes are sorted front first, so the first detected
                // vehicle is the nearest to the stop line.
                if nearest.is_none() {
                    nearest = Some(vehicle.position);
                }
            }
        }
        if let Some(position) = nearest {
            distances[approach] = world.params.lane_length - position;
        }
    }
    RawDetection {
        detected_counts: counts,
        nearest_detected_distance: distances,
        phase: world.phase,
        amber: world.phase.id.is_amber(),
        clock: world.clock,
    }
}

/// Outcome of one simulation step.
#[derive(Debug, Clone)]
pub struct StepStats {
    /// Mean per-vehicle reward after the step; in [-1, 0].
    pub reward: f64,
    pub present_all: usize,
    pub present_detected: usize,
    pub present_undetected: usize,
    /// Vehicles that crossed the stop line during this step.
    pub departed: Vec<Trip>,
}

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("step dt {got} does not match configured sim_dt {expected}")]
    DtMismatch { expected: f64, got: f64 },
}

/// Full intersection state: signal, per-approach vehicle lanes, pending
/// spawn queues, clock, and the owned RNG. Deterministic given the seed and
/// the command sequence.
#[derive(Debug, Clone)]
pub struct World {
    params: RoadParams,
    arrivals: ArrivalSpec,
    perturb: Perturbations,
    pub clock: f64,
    pub phase: SignalPhase,
    /// Per approach, sorted by position descending: front of queue first.
    lanes: Vec<Vec<Vehicle>>,
    /// Arrivals blocked by spacing, waiting for room at the lane entry.
    pending: Vec<VecDeque<Arrival>>,
    rng: ChaCha8Rng,
    next_id: u64,
    spawned: u64,
    departed: u64,
}

impl World {
    pub fn new(
        params: RoadParams,
        arrivals: ArrivalSpec,
        perturb: Perturbations,
        seed: u64,
    ) -> Self {
        let n = params.approaches;
        Self {
            params,
            arrivals,
            perturb,
            clock: 0.0,
            phase: SignalPhase::new(PhaseId::NsGreen),
            lanes: vec![Vec::new(); n],
            pending: vec![VecDeque::new(); n],
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_id: 0,
            spawned: 0,
            departed: 0,
        }
    }

    /// World starting at an arbitrary time of day (used by day-long runs and
    /// for exercising the time-of-day observation field).
    pub fn with_start_clock(mut self, clock: f64) -> Self {
        self.clock = clock;
        self
    }

    pub fn params(&self) -> &RoadParams {
        &self.params
    }

    pub fn detection_rate(&self) -> f64 {
        self.arrivals.detection_rate
    }

    pub fn lanes(&self) -> &[Vec<Vehicle>] {
        &self.lanes
    }

    pub fn vehicles_present(&self) -> usize {
        self.lanes.iter().map(Vec::len).sum()
    }

    pub fn vehicles_pending(&self) -> usize {
        self.pending.iter().map(VecDeque::len).sum()
    }

    /// Vehicles admitted into a lane so far.
    pub fn vehicles_spawned(&self) -> u64 {
        self.spawned
    }

    pub fn vehicles_departed(&self) -> u64 {
        self.departed
    }

    /// Mutable access for tests that need to build specific configurations;
    /// the caller is responsible for keeping lanes sorted and spaced.
    pub fn lanes_mut(&mut self) -> &mut Vec<Vec<Vehicle>> {
        &mut self.lanes
    }

    /// Advances the world by one step of exactly `params.sim_dt` seconds.
    ///
    /// Order within a step: the command is applied to the signal, vehicles
    /// move (front first), departures are collected, the clock advances and
    /// amber auto-expires, then new arrivals are admitted at the entry.
    pub fn step(&mut self, command: Action, dt: f64) -> Result<StepStats, StepError> {
        if (dt - self.params.sim_dt).abs() > 1e-12 {
            return Err(StepError::DtMismatch {
                expected: self.params.sim_dt,
                got: dt,
            });
        }
        Ok(self.advance(command))
    }

    fn advance(&mut self, command: Action) -> StepStats {
        let dt = self.params.sim_dt;

        // Signal command: a switch on green enters amber; during amber every
        // command is ignored because the interval is non-interruptible.
        if command == Action::Switch && self.phase.id.is_green() {
            self.phase = SignalPhase::new(self.phase.id.next());
        }

        let departed = self.move_vehicles(dt);

        self.clock += dt;
        self.phase.elapsed += dt;
        if self.phase.id.is_amber() && self.phase.elapsed >= self.params.amber_duration - 1e-9 {
            self.phase = SignalPhase::new(self.phase.id.next());
        }

        self.admit_arrivals(dt);

        let mut present_detected = 0;
        let mut present_undetected = 0;
        for lane in &self.lanes {
            for vehicle in lane {
                if vehicle.detected {
                    present_detected += 1;
                } else {
                    present_undetected += 1;
                }
            }
        }

        StepStats {
            reward: step_reward(self),
            present_all: present_detected + present_undetected,
            present_detected,
            present_undetected,
            departed,
        }
    }

    fn move_vehicles(&mut self, dt: f64) -> Vec<Trip> {
        let params = self.params.clone();
        let headway = params.vehicle_length + params.min_gap;
        let depart_clock = self.clock + dt;
        let mut trips = Vec::new();

        for (approach, lane) in self.lanes.iter_mut().enumerate() {
            let green = self.phase.id.approach_has_green(approach);
            let mut crossed = 0usize;
            for i in 0..lane.len() {
                // Leader constraint from the already-updated vehicle ahead,
                // or from the stop line on red/amber for the front vehicle.
                // The stop line acts as a stationary virtual leader placed
                // one headway beyond it so that the vehicle can stop exactly
                // at the line.
                let leader = if i == 0 {
                    if green {
                        None
                    } else {
                        Some((params.lane_length + headway, 0.0))
                    }
                } else {
                    Some((lane[i - 1].position, lane[i - 1].speed))
                };

                let vehicle = &mut lane[i];
                let new_speed = match leader {
                    None => compute_target_speed(vehicle.speed, f64::INFINITY, 0.0, &params),
                    Some((leader_pos, leader_speed)) => {
                        let gap = (leader_pos - vehicle.position - headway).max(0.0);
                        let target =
                            compute_target_speed(vehicle.speed, gap, leader_speed, &params);
                        // Hard cap so the spacing invariant holds exactly in
                        // discrete time.
                        target.min(gap / dt)
                    }
                }
                .min(vehicle.desired_speed)
                .max(0.0);

                vehicle.speed = new_speed;
                vehicle.position += new_speed * dt;
                if new_speed < params.wait_speed_threshold {
                    vehicle.accumulated_wait += dt;
                }
                vehicle.accumulated_penalty += vehicle_penalty(new_speed, params.v_max);

                if green && vehicle.position >= params.lane_length {
                    crossed += 1;
                }
            }
            // Departures are always a prefix of the lane: followers can only
            // cross if their leader crossed further.
            for vehicle in lane.drain(..crossed) {
                trips.push(Trip {
                    vehicle,
                    depart_time: depart_clock,
                });
            }
            self.departed += crossed as u64;
        }
        trips
    }

    fn admit_arrivals(&mut self, dt: f64) {
        // Rates are looked up at the step's start time.
        let sampled = generate_arrivals(&self.arrivals, self.clock - dt, dt, &mut self.rng);
        for arrival in sampled {
            let copies = if self.perturb.bulk_prob > 0.0
                && self.rng.gen::<f64>() < self.perturb.bulk_prob
            {
                self.perturb.bulk_size.max(1)
            } else {
                1
            };
            for _ in 0..copies {
                self.pending[arrival.approach].push_back(arrival);
            }
        }

        let headway = self.params.vehicle_length + self.params.min_gap;
        for approach in 0..self.params.approaches {
            while let Some(arrival) = self.pending[approach].front().copied() {
                let rear = self.lanes[approach].last().map(|v| (v.position, v.speed));
                let room = match rear {
                    None => true,
                    Some((rear_pos, _)) => rear_pos - headway >= 0.0,
                };
                if !room {
                    break;
                }

                let mut position = 0.0;
                if self.perturb.mid_lane_spawn {
                    let target = self.rng.gen::<f64>() * (self.params.lane_length / 2.0);
                    position = match rear {
                        None => target,
                        Some((rear_pos, _)) => target.min(rear_pos - headway),
                    }
                    .max(0.0);
                }

                let desired_speed = if self.perturb.speed_noise_sigma > 0.0 {
                    self.sample_desired_speed()
                } else {
                    self.params.v_max
                };

                let speed = match rear {
                    None => desired_speed,
                    Some((rear_pos, rear_speed)) => {
                        let gap = (rear_pos - position - headway).max(0.0);
                        compute_target_speed(desired_speed, gap, rear_speed, &self.params)
                            .min(desired_speed)
                    }
                };

                let vehicle = Vehicle {
                    id: self.next_id,
                    approach,
                    position,
                    speed,
                    desired_speed,
                    detected: arrival.detected,
                    spawn_time: self.clock,
                    accumulated_wait: 0.0,
                    accumulated_penalty: 0.0,
                };
                self.next_id += 1;
                self.spawned += 1;
                self.lanes[approach].push(vehicle);
                self.pending[approach].pop_front();
            }
        }
    }

    /// Truncated-normal desired speed centered on v_max, resampled into
    /// [0.3 * v_max, v_max].
    fn sample_desired_speed(&mut self) -> f64 {
        let v_max = self.params.v_max;
        let lo = 0.3 * v_max;
        let normal = Normal::new(v_max, self.perturb.speed_noise_sigma).expect("sigma > 0");
        for _ in 0..16 {
            let sample = normal.sample(&mut self.rng);
            if (lo..=v_max).contains(&sample) {
                return sample;
            }
        }
        v_max
    }
}
