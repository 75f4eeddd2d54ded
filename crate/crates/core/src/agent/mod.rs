//! Recurrent TD3: the learner that consumes GRU-encoded states.

mod buffer;
mod td3;

pub use buffer::{Batch, ReplayBuffer, Transition};
pub use td3::{Td3Agent, Td3Config, UpdateReport};

use thiserror::Error;

use crate::checkpoint::CheckpointError;
use crate::nn::NnError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("replay buffer holds {have} transitions, {need} required")]
    InsufficientData { have: usize, need: usize },
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
    #[error("invalid agent configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}
