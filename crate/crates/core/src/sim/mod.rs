//! Discrete-time microscopic simulation of a single signalized intersection
//! with Poisson arrivals and Bernoulli-sampled vehicle detectability.

pub mod arrivals;
pub mod metrics;
pub mod params;
pub mod signal;
pub mod vehicle;
pub mod world;

pub use arrivals::{generate_arrivals, Arrival, ArrivalSpec, ArrivalSpecError, RateProfile};
pub use metrics::{collect_metrics, MetricsRecord};
pub use params::{ParamError, Perturbations, RoadParams};
pub use signal::{Action, PhaseId, SignalPhase};
pub use vehicle::{Trip, Vehicle};
pub use world::{compute_target_speed, measure_state, step_reward, RawDetection, StepError, StepStats, World};
