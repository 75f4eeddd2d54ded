//! Training orchestration: episodes, heading resets, interventions,
//! evaluation and best-checkpoint selection.

mod checkpoint;
mod env;
mod episode;
mod metrics;
mod run;
mod strategy;

pub use checkpoint::RunCheckpoint;
pub use env::{check_bounds, intervene, Environment, Platform, ResetOutcome, SimEnv, StepOutcome};
pub use episode::{encode_state, run_episode, EpisodeOutcome, Learner};
pub use metrics::{EpisodeRow, EvalRecord, RunMetrics};
pub use run::{evaluate_policy, select_best, train, train_in_process, training_env, TrainOutcome};
pub use strategy::{reset_heading, ResetStrategy};

use thiserror::Error;

use crate::agent::AgentError;
use crate::bridge::BridgeError;
use crate::checkpoint::CheckpointError;
use crate::nn::NnError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("environment transport: {0}")]
    Transport(#[from] BridgeError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("writing run output: {0}")]
    Io(#[from] std::io::Error),
    #[error("no evaluation records to select from")]
    NoEvaluations,
}
