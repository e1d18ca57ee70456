use super::vehicle::Trip;

/// Per-episode aggregate outcomes, with waiting time split by detectability.
/// Means are `None` when the corresponding class saw no departures, never
/// NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub departures: usize,
    pub departures_detected: usize,
    pub departures_undetected: usize,
    pub wait_all: Option<f64>,
    pub wait_detected: Option<f64>,
    pub wait_undetected: Option<f64>,
    /// Mean trip duration between lane entry and the stop line, seconds.
    pub trip_mean: Option<f64>,
}

impl MetricsRecord {
    pub fn is_empty(&self) -> bool {
        self.departures == 0
    }
}

/// Aggregates completed trips whose spawn time falls inside
/// `clock_range = [start, end)`. Trips that began outside the range (for
/// example during a warm-up period) are excluded.
pub fn collect_metrics(departed: &[Trip], clock_range: (f64, f64)) -> MetricsRecord {
    let (start, end) = clock_range;
    let mut n_det = 0usize;
    let mut n_undet = 0usize;
    let mut wait_det = 0.0;
    let mut wait_undet = 0.0;
    let mut trip_total = 0.0;

    for trip in departed {
        let spawn = trip.vehicle.spawn_time;
        if spawn < start || spawn >= end {
            continue;
        }
        if trip.vehicle.detected {
            n_det += 1;
            wait_det += trip.vehicle.accumulated_wait;
        } else {
            n_undet += 1;
            wait_undet += trip.vehicle.accumulated_wait;
        }
        trip_total += trip.duration();
    }

    let n_all = n_det + n_undet;
    let mean = |sum: f64, n: usize| if n == 0 { None } else { Some(sum / n as f64) };

    MetricsRecord {
        departures: n_all,
        departures_detected: n_det,
        departures_undetected: n_undet,
        wait_all: mean(wait_det + wait_undet, n_all),
        wait_detected: mean(wait_det, n_det),
        wait_undetected: mean(wait_undet, n_undet),
        trip_mean: mean(trip_total, n_all),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::vehicle::Vehicle;

    fn trip(detected: bool, wait: f64, spawn: f64, depart: f64) -> Trip {
        Trip {
            vehicle: Vehicle {
                id: 0,
                approach: 0,
                position: 125.0,
                speed: 10.0,
                desired_speed: 13.89,
                detected,
                spawn_time: spawn,
                accumulated_wait: wait,
                accumulated_penalty: 0.0,
            },
            depart_time: depart,
        }
    }

    #[test]
    fn single_detected_vehicle() {
        let trips = vec![trip(true, 10.0, 0.0, 30.0)];
        let record = collect_metrics(&trips, (0.0, 100.0));
        assert_eq!(record.wait_all, Some(10.0));
        assert_eq!(record.wait_detected, Some(10.0));
        assert_eq!(record.wait_undetected, None);
        assert_eq!(record.trip_mean, Some(30.0));
        assert_eq!(record.departures, 1);
    }

    #[test]
    fn split_means_average_correctly() {
        let trips = vec![trip(true, 4.0, 0.0, 20.0), trip(false, 8.0, 0.0, 25.0)];
        let record = collect_metrics(&trips, (0.0, 100.0));
        assert_eq!(record.wait_detected, Some(4.0));
        assert_eq!(record.wait_undetected, Some(8.0));
        assert_eq!(record.wait_all, Some(6.0));
    }

    #[test]
    fn full_detection_gives_degenerate_split() {
        let trips = vec![trip(true, 3.0, 0.0, 20.0), trip(true, 5.0, 0.0, 25.0)];
        let record = collect_metrics(&trips, (0.0, 100.0));
        assert_eq!(record.wait_undetected, None);
        assert_eq!(record.wait_all, record.wait_detected);
    }

    #[test]
    fn empty_input_is_flagged_not_nan() {
        let record = collect_metrics(&[], (0.0, 100.0));
        assert!(record.is_empty());
        assert_eq!(record.wait_all, None);
        assert_eq!(record.trip_mean, None);
    }

    #[test]
    fn warmup_trips_are_excluded_by_spawn_time() {
        let trips = vec![trip(true, 50.0, 10.0, 400.0), trip(true, 2.0, 350.0, 380.0)];
        let record = collect_metrics(&trips, (300.0, 3600.0));
        assert_eq!(record.departures, 1);
        assert_eq!(record.wait_all, Some(2.0));
    }
}
