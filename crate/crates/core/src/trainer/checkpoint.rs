use std::path::Path;

use crate::agent::Td3Agent;
use crate::checkpoint::{CheckpointError, Reader, Writer};
use crate::config::RunConfig;
use crate::nn::GruEncoder;

/// Everything needed to resume training or run the policy: the run
/// configuration text, the fixed encoder, and the full agent.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCheckpoint {
    pub config_text: String,
    pub config: RunConfig,
    /// Training episodes completed when the snapshot was taken.
    pub episode: u64,
    pub encoder: GruEncoder,
    pub agent: Td3Agent,
}

impl RunCheckpoint {
    pub fn new(config: &RunConfig, episode: u64, encoder: &GruEncoder, agent: &Td3Agent) -> Self {
        Self {
            config_text: config.to_toml(),
            config: config.clone(),
            episode,
            encoder: encoder.clone(),
            agent: agent.clone(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.header();
        w.str(&self.config_text);
        w.u64(self.episode);
        self.encoder.write(&mut w);
        self.agent.write(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader::new(bytes);
        r.header()?;
        let at = r.offset();
        let config_text = r.str()?;
        let config = RunConfig::from_toml(&config_text).map_err(|_| CheckpointError::Invalid {
            what: "embedded configuration",
            offset: at,
        })?;
        let episode = r.u64()?;
        let enc_at = r.offset();
        let encoder = GruEncoder::read(&mut r)?;
        let agent = Td3Agent::read(&mut r)?;
        r.finish()?;
        if agent.state_dim() != encoder.hidden_dim() + encoder.input_dim() {
            return Err(CheckpointError::Invalid {
                what: "encoder/agent dimensions",
                offset: enc_at,
            });
        }
        Ok(Self {
            config_text,
            config,
            episode,
            encoder,
            agent,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
