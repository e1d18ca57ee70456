//! crossflow: a desk-scale microscopic simulator of one signalized intersection
//! where only a fraction of vehicles are visible to the controller, plus a
//! from-scratch deep Q-learning signal agent and an experiment harness.
//!
//! The crate is organized around five subsystems:
//!
//! - [`sim`] — discrete-time car-following simulation with Poisson arrivals
//!   and per-vehicle Bernoulli detectability.
//! - [`nn`] — minimal dense MLP with backpropagation, Adam, and a versioned
//!   binary checkpoint format.
//! - [`agent`] — observation encoding, epsilon-greedy control, experience
//!   replay, target-network TD learning, and the min/max phase guard.
//! - [`baselines`] — pre-timed and longest-queue reference controllers.
//! - [`harness`] — scenario library, episode runner, experiment sweeps,
//!   statistics, and CSV export.

pub mod agent;
pub mod baselines;
pub mod harness;
pub mod nn;
pub mod sim;
