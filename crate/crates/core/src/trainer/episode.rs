use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Environment, ResetStrategy, TrainError};
use crate::agent::{ReplayBuffer, Td3Agent, Transition};
use crate::config::RunConfig;
use crate::nn::GruEncoder;
use crate::rng::{stream, sub_seed, Stream};

/// `z = hidden ⧺ obs` after folding `obs` into the encoder.
pub fn encode_state(encoder: &mut GruEncoder, obs: &[f64]) -> Result<Vec<f64>, TrainError> {
    let mut z = encoder.step(obs)?.to_vec();
    z.extend_from_slice(obs);
    Ok(z)
}

/// Everything that learns or draws randomness during training.
#[derive(Debug, Clone)]
pub struct Learner {
    pub agent: Td3Agent,
    pub encoder: GruEncoder,
    pub buffer: ReplayBuffer,
    pub agent_rng: ChaCha8Rng,
    pub warmup_rng: ChaCha8Rng,
    /// Exploring environment steps taken so far.
    pub env_steps: usize,
    /// Skip gradient updates entirely.
    pub dry_run: bool,
}

impl Learner {
    pub fn new(cfg: &RunConfig, obs_dim: usize) -> Result<Self, TrainError> {
        let seed = cfg.train.seed;
        let encoder = GruEncoder::new(obs_dim, cfg.agent.encoder_hidden_dim, sub_seed(seed, Stream::Encoder))?;
        let state_dim = cfg.agent.encoder_hidden_dim + obs_dim;
        let agent = Td3Agent::new(
            state_dim,
            crate::sim::NUM_SERVOS,
            cfg.agent.clone(),
            &mut stream(seed, Stream::AgentInit),
        )?;
        let buffer = ReplayBuffer::new(cfg.agent.buffer_capacity, state_dim, crate::sim::NUM_SERVOS)?;
        Ok(Self {
            agent,
            encoder,
            buffer,
            agent_rng: stream(seed, Stream::Agent),
            warmup_rng: stream(seed, Stream::Warmup),
            env_steps: 0,
            dry_run: cfg.train.dry_run,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub steps: usize,
    pub ret: f64,
    pub discounted: f64,
    pub rewards: Vec<f64>,
    pub interventions: usize,
    /// Ended before `steps_per_episode` because of an intervention.
    pub early_terminated: bool,
    pub theta: f64,
}

/// Runs one episode.
///
/// The heading is re-drawn and the encoder cleared; the robot itself is not
/// moved. When exploring, transitions are stored and one update follows each
/// step once warm-up is over; otherwise the agent and buffer are untouched.
pub fn run_episode<E: Environment + ?Sized>(
    learner: &mut Learner,
    env: &mut E,
    strategy: &ResetStrategy,
    reset_rng: &mut ChaCha8Rng,
    steps: usize,
    explore: bool,
) -> Result<EpisodeOutcome, TrainError> {
    let reset = env.reset_heading(strategy.sample_offset(reset_rng))?;
    learner.encoder.reset();
    let gamma = learner.agent.config.gamma;
    let warmup = learner.agent.config.warmup_steps;
    let mut out = EpisodeOutcome {
        steps: 0,
        ret: 0.0,
        discounted: 0.0,
        rewards: Vec::with_capacity(steps),
        interventions: 0,
        early_terminated: false,
        theta: reset.theta,
    };
    if steps == 0 {
        return Ok(out);
    }
    let mut z = encode_state(&mut learner.encoder, &reset.obs)?;
    let mut discount = 1.0;
    for t in 0..steps {
        let action = if explore && learner.env_steps < warmup {
            (0..learner.agent.action_dim())
                .map(|_| learner.warmup_rng.gen_range(-1.0..=1.0))
                .collect()
        } else {
            learner.agent.select_action(&z, explore, &mut learner.agent_rng)?
        };
        let step = env.step(&action)?;
        let z_next = encode_state(&mut learner.encoder, &step.obs)?;
        out.steps += 1;
        out.ret += step.reward;
        out.discounted += discount * step.reward;
        out.rewards.push(step.reward);
        discount *= gamma;

        if explore {
            learner.buffer.push(&Transition {
                z: std::mem::take(&mut z),
                a: action,
                r: step.reward,
                z_next: z_next.clone(),
                done: step.intervened,
            })?;
            learner.env_steps += 1;
            if !learner.dry_run
                && learner.env_steps >= warmup
                && learner.buffer.len() >= learner.agent.config.batch_size
            {
                learner.agent.update(&learner.buffer, &mut learner.agent_rng)?;
            }
        }
        z = z_next;

        if step.intervened {
            out.interventions += 1;
            out.early_terminated = t + 1 < steps;
            break;
        }
    }
    Ok(out)
}
