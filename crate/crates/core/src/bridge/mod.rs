//! Line-oriented wire protocol between the trainer and a robot-side process.
//!
//! One message per line: `topic seq t payload...`, space separated. The
//! trainer sends `quad/reset` and `quad/action`; the robot side answers with
//! `quad/ack` and `quad/obs`. See `PROTOCOL.md` for the field layout.

mod client;
mod codec;
mod server;

pub use client::RemoteEnv;
pub use codec::{decode_message, encode_message, Message, Topic, ACK_HEADER, OBS_HEADER};
pub use server::{serve_env, EnvServer, SessionEnd};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("timed out after {0} ms waiting for a reply")]
    Timeout(u64),
    #[error("connection lost: {0}")]
    ConnectionLost(String),
    #[error("malformed message at byte {offset}: {reason}")]
    Decode { offset: usize, reason: String },
    #[error("out-of-order sequence number: expected {expected}, got {got}")]
    Sequence { expected: u64, got: u64 },
    #[error("unexpected {got} reply to {sent}")]
    Unexpected { sent: &'static str, got: &'static str },
    #[error("remote environment failed: {0}")]
    Remote(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
