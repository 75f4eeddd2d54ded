//! Directional-locomotion reinforcement-learning lab.
//!
//! The crate bundles everything needed to train and validate a directional
//! walking policy for an 8-servo quadruped on a deterministic kinematic
//! surrogate:
//!
//! - [`nn`]: dense MLP with hand-written backpropagation, Adam, and a
//!   fixed-weight GRU used as an observation-sequence encoder.
//! - [`agent`]: the recurrent TD3 learner (replay buffer of GRU-encoded
//!   transitions, twin critics, delayed actor, target smoothing).
//! - [`sim`]: the quadruped surrogate, observation assembly and reward.
//! - [`trainer`]: episode lifecycle, heading-reset strategies, platform
//!   interventions, evaluation and best-policy selection.
//! - [`validation`]: waypoint courses, the atan2 heading controller, and
//!   CSV/SVG reports.
//! - [`bridge`]: newline-delimited topic protocol for running the simulator
//!   behind a TCP socket.
//!
//! See `examples/` for one runnable program per capability.

pub mod agent;
pub mod angle;
pub mod bridge;
pub mod checkpoint;
pub mod config;
pub mod nn;
pub mod rng;
pub mod sim;
pub mod sweep;
pub mod trainer;
pub mod validation;

pub use agent::{ReplayBuffer, Td3Agent, Td3Config, Transition};

pub use nn::{Activation, Adam, GruEncoder, Mlp};
pub use sim::{ObsConfig, Pose, RobotGeometry, Sim, SimNoise};
pub use config::RunConfig;
pub use trainer::{ResetStrategy, RunCheckpoint, RunMetrics};
pub use validation::{Trajectory, ValidationReport};


