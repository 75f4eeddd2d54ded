use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AgentError, Batch, ReplayBuffer};
use crate::checkpoint::{CheckpointError, Reader, Writer};
use crate::nn::{Activation, Adam, AdamConfig, Mlp};

/// Hyperparameters of the TD3 update rule and network shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Td3Config {
    pub hidden_widths: Vec<usize>,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub gamma: f64,
    pub tau: f64,
    pub policy_delay: u64,
    pub target_noise_sigma: f64,
    pub target_noise_clip: f64,
    pub exploration_sigma: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub warmup_steps: usize,
    pub encoder_hidden_dim: usize,
}

impl Default for Td3Config {
    fn default() -> Self {
        Self {
            hidden_widths: vec![256, 256],
            actor_lr: 3e-4,
            critic_lr: 3e-4,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            gamma: 0.99,
            tau: 0.005,
            policy_delay: 2,
            target_noise_sigma: 0.2,
            target_noise_clip: 0.5,
            exploration_sigma: 0.1,
            batch_size: 256,
            buffer_capacity: 300_000,
            warmup_steps: 1_000,
            encoder_hidden_dim: 32,
        }
    }
}

impl Td3Config {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::Config(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must lie in (0, 1]");
        }
        if self.policy_delay == 0 || self.batch_size == 0 || self.buffer_capacity == 0 {
            return bad("policy_delay, batch_size and buffer_capacity must be positive");
        }
        if self.hidden_widths.iter().any(|&w| w == 0) || self.encoder_hidden_dim == 0 {
            return bad("network widths must be positive");
        }
        if self.target_noise_sigma < 0.0 || self.target_noise_clip < 0.0 || self.exploration_sigma < 0.0 {
            return bad("noise scales must be non-negative");
        }
        if self.actor_lr <= 0.0 || self.critic_lr <= 0.0 {
            return bad("learning rates must be positive");
        }
        Ok(())
    }

    fn adam(&self, lr: f64) -> AdamConfig {
        AdamConfig {
            learning_rate: lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.adam_epsilon,
        }
    }

    fn write(&self, w: &mut Writer) {
        w.usizes(&self.hidden_widths);
        for v in [
            self.actor_lr,
            self.critic_lr,
            self.beta1,
            self.beta2,
            self.adam_epsilon,
            self.gamma,
            self.tau,
        ] {
            w.f64(v);
        }
        w.u64(self.policy_delay);
        w.f64(self.target_noise_sigma);
        w.f64(self.target_noise_clip);
        w.f64(self.exploration_sigma);
        w.u64(self.batch_size as u64);
        w.u64(self.buffer_capacity as u64);
        w.u64(self.warmup_steps as u64);
        w.u64(self.encoder_hidden_dim as u64);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, CheckpointError> {
        Ok(Self {
            hidden_widths: r.usizes()?,
            actor_lr: r.f64()?,
            critic_lr: r.f64()?,
            beta1: r.f64()?,
            beta2: r.f64()?,
            adam_epsilon: r.f64()?,
            gamma: r.f64()?,
            tau: r.f64()?,
            policy_delay: r.u64()?,
            target_noise_sigma: r.f64()?,
            target_noise_clip: r.f64()?,
            exploration_sigma: r.f64()?,
            batch_size: r.u64()? as usize,
            buffer_capacity: r.u64()? as usize,
            warmup_steps: r.u64()? as usize,
            encoder_hidden_dim: r.u64()? as usize,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateReport {
    pub critic1_loss: f64,
    pub critic2_loss: f64,
    pub actor_loss: Option<f64>,
}

/// Deterministic actor, twin critics, and their Polyak-averaged targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Td3Agent {
    pub config: Td3Config,
    state_dim: usize,
    action_dim: usize,
    actor: Mlp,
    critic1: Mlp,
    critic2: Mlp,
    actor_target: Mlp,
    critic1_target: Mlp,
    critic2_target: Mlp,
    actor_opt: Adam,
    critic1_opt: Adam,
    critic2_opt: Adam,
    update_count: u64,
}

/// Row-wise concatenation `[states | actions]`.
fn join_rows(states: &[f64], state_dim: usize, actions: &[f64], action_dim: usize, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * (state_dim + action_dim));
    for i in 0..n {
        out.extend_from_slice(&states[i * state_dim..(i + 1) * state_dim]);
        out.extend_from_slice(&actions[i * action_dim..(i + 1) * action_dim]);
    }
    out
}

impl Td3Agent {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        action_dim: usize,
        config: Td3Config,
        rng: &mut R,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        let mut actor_sizes = vec![state_dim];
        actor_sizes.extend(&config.hidden_widths);
        actor_sizes.push(action_dim);
        let mut critic_sizes = vec![state_dim + action_dim];
        critic_sizes.extend(&config.hidden_widths);
        critic_sizes.push(1);

        let actor = Mlp::new(&actor_sizes, Activation::Tanh, rng)?;
        let critic1 = Mlp::new(&critic_sizes, Activation::Identity, rng)?;
        let critic2 = Mlp::new(&critic_sizes, Activation::Identity, rng)?;
        Self::from_networks(config, actor, critic1, critic2)
    }

    /// Assembles an agent from explicit online networks; targets start as
    /// exact copies.
    pub fn from_networks(config: Td3Config, actor: Mlp, critic1: Mlp, critic2: Mlp) -> Result<Self, AgentError> {
        config.validate()?;
        let state_dim = actor.input_dim();
        let action_dim = actor.output_dim();
        for c in [&critic1, &critic2] {
            if c.input_dim() != state_dim + action_dim || c.output_dim() != 1 || c.layer_sizes() != critic1.layer_sizes() {
                return Err(AgentError::Config(format!(
                    "critic shape {:?} incompatible with actor {:?}",
                    c.layer_sizes(),
                    actor.layer_sizes()
                )));
            }
        }
        Ok(Self {
            actor_opt: Adam::new(actor.num_params(), config.adam(config.actor_lr)),
            critic1_opt: Adam::new(critic1.num_params(), config.adam(config.critic_lr)),
            critic2_opt: Adam::new(critic2.num_params(), config.adam(config.critic_lr)),
            actor_target: actor.clone(),
            critic1_target: critic1.clone(),
            critic2_target: critic2.clone(),
            actor,
            critic1,
            critic2,
            config,
            state_dim,
            action_dim,
            update_count: 0,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn critics(&self) -> (&Mlp, &Mlp) {
        (&self.critic1, &self.critic2)
    }

    pub fn targets(&self) -> (&Mlp, &Mlp, &Mlp) {
        (&self.actor_target, &self.critic1_target, &self.critic2_target)
    }

    pub fn actor_mut(&mut self) -> &mut Mlp {
        &mut self.actor
    }

    pub fn critics_mut(&mut self) -> (&mut Mlp, &mut Mlp) {
        (&mut self.critic1, &mut self.critic2)
    }

    /// Largest absolute difference between any online parameter and its
    /// target counterpart.
    pub fn max_target_gap(&self) -> f64 {
        [
            (&self.actor, &self.actor_target),
            (&self.critic1, &self.critic1_target),
            (&self.critic2, &self.critic2_target),
        ]
        .iter()
        .flat_map(|(o, t)| o.params().iter().zip(t.params()).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
    }

    /// Policy output at `z`; in explore mode each component gets independent
    /// `N(0, exploration_sigma²)` noise and is clamped to `[-1, 1]`.
    pub fn select_action<R: Rng + ?Sized>(&self, z: &[f64], explore: bool, rng: &mut R) -> Result<Vec<f64>, AgentError> {
        let mut a = self.actor.forward(z)?;
        if explore && self.config.exploration_sigma > 0.0 {
            let noise = Normal::new(0.0, self.config.exploration_sigma).expect("sigma validated");
            for v in &mut a {
                *v = (*v + noise.sample(rng)).clamp(-1.0, 1.0);
            }
        }
        Ok(a)
    }

    fn check_batch(&self, batch: &Batch) -> Result<(), AgentError> {
        if batch.state_dim != self.state_dim || batch.action_dim != self.action_dim {
            return Err(AgentError::InvalidTransition(format!(
                "batch dims ({}, {}) vs agent ({}, {})",
                batch.state_dim, batch.action_dim, self.state_dim, self.action_dim
            )));
        }
        Ok(())
    }

    /// Clipped double-Q targets with target-policy smoothing.
    ///
    /// Smoothing noise is drawn row-major over `batch × action_dim`.
    pub fn compute_critic_target<R: Rng + ?Sized>(&self, batch: &Batch, rng: &mut R) -> Result<Vec<f64>, AgentError> {
        self.check_batch(batch)?;
        let n = batch.len;
        let (sd, ad) = (self.state_dim, self.action_dim);
        let mut next_actions = self.actor_target.forward_batch(&batch.z_next, n)?.output().to_vec();
        let clip = self.config.target_noise_clip;
        if self.config.target_noise_sigma > 0.0 {
            let noise = Normal::new(0.0, self.config.target_noise_sigma).expect("sigma validated");
            for a in &mut next_actions {
                let eps: f64 = noise.sample(rng);
                *a = (*a + eps.clamp(-clip, clip)).clamp(-1.0, 1.0);
            }
        }
        let inputs = join_rows(&batch.z_next, sd, &next_actions, ad, n);
        let q1 = self.critic1_target.forward_batch(&inputs, n)?;
        let q2 = self.critic2_target.forward_batch(&inputs, n)?;
        Ok((0..n)
            .map(|i| {
                let q = q1.output()[i].min(q2.output()[i]);
                batch.r[i] + self.config.gamma * (1.0 - batch.done[i]) * q
            })
            .collect())
    }

    /// One Adam step of each critic toward `targets` under mean-squared
    /// error. Returns the losses measured before the step.
    pub fn train_critics(&mut self, batch: &Batch, targets: &[f64]) -> Result<(f64, f64), AgentError> {
        self.check_batch(batch)?;
        let n = batch.len;
        if targets.len() != n {
            return Err(AgentError::InvalidTransition(format!("{} targets for batch of {n}", targets.len())));
        }
        let inputs = join_rows(&batch.z, self.state_dim, &batch.a, self.action_dim, n);
        let mut losses = [0.0; 2];
        for (k, (net, opt)) in [
            (&mut self.critic1, &mut self.critic1_opt),
            (&mut self.critic2, &mut self.critic2_opt),
        ]
        .into_iter()
        .enumerate()
        {
            let cache = net.forward_batch(&inputs, n)?;
            let q = cache.output();
            let mut cot = vec![0.0; n];
            let mut loss = 0.0;
            for i in 0..n {
                let err = q[i] - targets[i];
                loss += err * err;
                cot[i] = 2.0 * err / n as f64;
            }
            losses[k] = loss / n as f64;
            let mut grads = vec![0.0; net.num_params()];
            net.backward(&cache, &cot, Some(&mut grads), false)?;
            opt.step(net.params_mut(), &grads)?;
        }
        Ok((losses[0], losses[1]))
    }

    /// One Adam step of the actor along the deterministic policy gradient
    /// `∇_a Q₁(z, a)|_{a=π(z)} · ∇_φ π(z)`, i.e. descent on `−mean Q₁`.
    /// Returns the loss before the step.
    pub fn train_actor(&mut self, states: &[f64], n: usize) -> Result<f64, AgentError> {
        let (sd, ad) = (self.state_dim, self.action_dim);
        let actor_cache = self.actor.forward_batch(states, n)?;
        let inputs = join_rows(states, sd, actor_cache.output(), ad, n);
        let critic_cache = self.critic1.forward_batch(&inputs, n)?;
        let loss = -critic_cache.output().iter().sum::<f64>() / n as f64;
        let cot = vec![-1.0 / n as f64; n];
        let dq_dinput = self
            .critic1
            .backward(&critic_cache, &cot, None, true)?
            .expect("input gradient requested");
        let mut dq_da = Vec::with_capacity(n * ad);
        for i in 0..n {
            let row = &dq_dinput[i * (sd + ad)..(i + 1) * (sd + ad)];
            dq_da.extend_from_slice(&row[sd..]);
        }
        let mut grads = vec![0.0; self.actor.num_params()];
        self.actor.backward(&actor_cache, &dq_da, Some(&mut grads), false)?;
        self.actor_opt.step(self.actor.params_mut(), &grads)?;
        Ok(loss)
    }

    /// `θ_target ← τ·θ + (1−τ)·θ_target` for all three target networks.
    pub fn soft_update_targets(&mut self) -> Result<(), AgentError> {
        let tau = self.config.tau;
        self.actor_target.polyak_from(&self.actor, tau)?;
        self.critic1_target.polyak_from(&self.critic1, tau)?;
        self.critic2_target.polyak_from(&self.critic2, tau)?;
        Ok(())
    }

    /// Critic regression every call; actor step and target averaging every
    /// `policy_delay`-th call.
    pub fn update<R: Rng + ?Sized>(&mut self, buf: &ReplayBuffer, rng: &mut R) -> Result<UpdateReport, AgentError> {
        let n = self.config.batch_size;
        let batch = buf.sample(n, rng)?;
        let targets = self.compute_critic_target(&batch, rng)?;
        let (critic1_loss, critic2_loss) = self.train_critics(&batch, &targets)?;
        self.update_count += 1;
        let mut actor_loss = None;
        if self.update_count % self.config.policy_delay == 0 {
            actor_loss = Some(self.train_actor(&batch.z, n)?);
            self.soft_update_targets()?;
        }
        Ok(UpdateReport {
            critic1_loss,
            critic2_loss,
            actor_loss,
        })
    }

    pub fn write(&self, w: &mut Writer) {
        self.config.write(w);
        for net in [
            &self.actor,
            &self.critic1,
            &self.critic2,
            &self.actor_target,
            &self.critic1_target,
            &self.critic2_target,
        ] {
            net.write(w);
        }
        for opt in [&self.actor_opt, &self.critic1_opt, &self.critic2_opt] {
            opt.write(w);
        }
        w.u64(self.update_count);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CheckpointError> {
        let at = r.offset();
        let config = Td3Config::read(r)?;
        let actor = Mlp::read(r)?;
        let critic1 = Mlp::read(r)?;
        let critic2 = Mlp::read(r)?;
        let actor_target = Mlp::read(r)?;
        let critic1_target = Mlp::read(r)?;
        let critic2_target = Mlp::read(r)?;
        let actor_opt = Adam::read(r)?;
        let critic1_opt = Adam::read(r)?;
        let critic2_opt = Adam::read(r)?;
        let update_count = r.u64()?;
        let invalid = CheckpointError::Invalid {
            what: "agent layout",
            offset: at,
        };
        let mut agent = Self::from_networks(config, actor, critic1, critic2).map_err(|_| invalid)?;
        let same = |a: &Mlp, b: &Mlp| a.layer_sizes() == b.layer_sizes();
        if !same(&agent.actor, &actor_target)
            || !same(&agent.critic1, &critic1_target)
            || !same(&agent.critic2, &critic2_target)
            || actor_opt.first_moment().len() != agent.actor.num_params()
            || critic1_opt.first_moment().len() != agent.critic1.num_params()
            || critic2_opt.first_moment().len() != agent.critic2.num_params()
        {
            return Err(CheckpointError::Invalid {
                what: "agent layout",
                offset: at,
            });
        }
        agent.actor_target = actor_target;
        agent.critic1_target = critic1_target;
        agent.critic2_target = critic2_target;
        agent.actor_opt = actor_opt;
        agent.critic1_opt = critic1_opt;
        agent.critic2_opt = critic2_opt;
        agent.update_count = update_count;
        Ok(agent)
    }
}
