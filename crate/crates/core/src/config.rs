//! Structured-text run configuration.
//!
//! One TOML file with the sections `[train]`, `[agent]`, `[sim]`,
//! `[reward]`, `[obs]`, `[noise]`, `[strategy]` and an optional `[bridge]`.
//! Every field has a default; unknown keys are rejected.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agent::Td3Config;
use crate::sim::{ObsConfig, RewardWeights, SimConfig, SimNoise};
use crate::trainer::ResetStrategy;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub episodes: usize,
    pub steps_per_episode: usize,
    /// Platform rectangle `[0, width] × [0, height]`, meters.
    pub platform_width: f64,
    pub platform_height: f64,
    /// Episodes between non-exploration evaluations; 0 disables them.
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    /// Skip all gradient updates (step-accounting runs).
    pub dry_run: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 600,
            steps_per_episode: 500,
            platform_width: 3.5,
            platform_height: 2.5,
            eval_every: 50,
            eval_episodes: 3,
            seed: 0,
            dry_run: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    #[serde(alias = "yaw")]
    ToYaw,
    #[serde(alias = "uniform")]
    UniformEps,
    #[serde(alias = "normal")]
    NormalEps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Half-width of the uniform offset interval, radians.
    pub bound: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            kind: StrategyKind::NormalEps,
            bound: FRAC_PI_4,
            mu: 0.0,
            sigma: FRAC_PI_4,
        }
    }
}

impl StrategyConfig {
    pub fn strategy(&self) -> ResetStrategy {
        match self.kind {
            StrategyKind::ToYaw => ResetStrategy::ToYaw,
            StrategyKind::UniformEps => ResetStrategy::UniformEps { bound: self.bound },
            StrategyKind::NormalEps => ResetStrategy::NormalEps {
                mu: self.mu,
                sigma: self.sigma,
            },
        }
    }

    pub fn set_kind(&mut self, kind: StrategyKind) {
        self.kind = kind;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BridgeConfig {
    /// `host:port` of the environment server.
    pub endpoint: String,
    pub timeout_ms: u64,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self {
            endpoint: "127.0.0.1:7878".into(),
            timeout_ms: 5_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub agent: Td3Config,
    pub sim: SimConfig,
    pub reward: RewardWeights,
    pub obs: ObsConfig,
    pub noise: SimNoise,
    pub strategy: StrategyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeConfig>,
}

impl RunConfig {
    /// Reduced protocol that trains in about a minute on one CPU core:
    /// 150 × 200 steps, 64-wide networks, batch 64, exploration σ 0.3.
    pub fn desk() -> Self {
        let mut cfg = Self::default();
        cfg.train.episodes = 150;
        cfg.train.steps_per_episode = 200;
        cfg.train.eval_every = 10;
        cfg.train.eval_episodes = 3;
        cfg.agent.hidden_widths = vec![64, 64];
        cfg.agent.batch_size = 64;
        cfg.agent.actor_lr = 1e-3;
        cfg.agent.critic_lr = 1e-3;
        cfg.agent.buffer_capacity = 30_000;
        cfg.agent.exploration_sigma = 0.3;
        cfg
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.agent.validate().map_err(|e| invalid(&e))?;
        self.sim.validate().map_err(|e| invalid(&e))?;
        self.obs.validate().map_err(|e| invalid(&e))?;
        self.noise.validate().map_err(|e| invalid(&e))?;
        self.strategy.strategy().validate().map_err(|e| invalid(&e))?;
        let t = &self.train;
        if !(t.platform_width > 0.0 && t.platform_height > 0.0) {
            return Err(ConfigError::Invalid("platform dimensions must be positive".into()));
        }
        if t.eval_every > 0 && t.eval_episodes == 0 {
            return Err(ConfigError::Invalid("eval_episodes must be positive when evaluating".into()));
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        self.train.episodes * self.train.steps_per_episode
    }
}
