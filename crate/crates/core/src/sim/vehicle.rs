/// One simulated car. Positions are meters from the lane entry; the stop
/// line sits at `RoadParams::lane_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: u64,
    pub approach: usize,
    pub position: f64,
    pub speed: f64,
    /// Speed the driver aims for; equals `v_max` unless the speed-noise
    /// perturbation is active.
    pub desired_speed: f64,
    /// Whether the controller can see this vehicle.
    pub detected: bool,
    /// Clock at which the vehicle entered the lane.
    pub spawn_time: f64,
    /// Total seconds spent below the waiting-speed threshold.
    pub accumulated_wait: f64,
    /// Sum over sim steps of (1 - speed / v_max); dimensionless.
    pub accumulated_penalty: f64,
}

/// A completed trip: the vehicle's final record plus the clock at which it
/// crossed the stop line.
#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub vehicle: Vehicle,
    pub depart_time: f64,
}

impl Trip {
    /// Seconds between entering the lane and crossing the stop line.
    pub fn duration(&self) -> f64 {
        self.depart_time - self.vehicle.spawn_time
    }
}
