use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};

use super::{
    encode_state, run_episode, EpisodeRow, Environment, EvalRecord, Learner, ResetStrategy, RunCheckpoint,
    RunMetrics, SimEnv, TrainError,
};
use crate::agent::Td3Agent;
use crate::config::RunConfig;
use crate::nn::GruEncoder;
use crate::rng::{stream, sub_seed, Stream};
use crate::sim::SimNoise;

pub struct TrainOutcome {
    pub metrics: RunMetrics,
    /// Highest-scoring evaluation snapshot, if any evaluation ran.
    pub best: Option<RunCheckpoint>,
    pub best_index: Option<usize>,
    /// Final training state.
    pub learner: Learner,
}

/// Index of the highest score; ties go to the later record.
pub fn select_best(records: &[EvalRecord]) -> Result<usize, TrainError> {
    let mut best: Option<usize> = None;
    for (i, r) in records.iter().enumerate() {
        match best {
            Some(b) if r.score < records[b].score => {}
            _ => best = Some(i),
        }
    }
    best.ok_or(TrainError::NoEvaluations)
}

/// Mean undiscounted return of the deterministic policy over
/// `eval_episodes` episodes on a fresh noise-free simulator started at the
/// platform center. The agent is not modified.
pub fn evaluate_policy(cfg: &RunConfig, agent: &Td3Agent, encoder: &GruEncoder) -> Result<f64, TrainError> {
    let mut env = SimEnv::from_config(cfg, SimNoise::off())?;
    let strategy = cfg.strategy.strategy();
    let mut reset_rng = stream(cfg.train.seed, Stream::Eval);
    let mut encoder = encoder.clone();
    let episodes = cfg.train.eval_episodes.max(1);
    let mut total = 0.0;
    for _ in 0..episodes {
        let reset = env.reset_heading(strategy.sample_offset(&mut reset_rng))?;
        encoder.reset();
        let mut z = encode_state(&mut encoder, &reset.obs)?;
        for _ in 0..cfg.train.steps_per_episode {
            let a = agent.actor().forward(&z)?;
            let step = env.step(&a)?;
            total += step.reward;
            if step.intervened {
                break;
            }
            z = encode_state(&mut encoder, &step.obs)?;
        }
    }
    Ok(total / episodes as f64)
}

struct Sink {
    dir: PathBuf,
    trace: BufWriter<File>,
}

impl Sink {
    fn open(dir: &Path) -> Result<Self, TrainError> {
        std::fs::create_dir_all(dir.join("checkpoints"))?;
        let mut trace = BufWriter::new(File::create(dir.join("trace.csv"))?);
        writeln!(trace, "episode,sim_time,x,y,yaw,theta,reward")?;
        Ok(Self { dir: dir.to_path_buf(), trace })
    }

    fn finish(mut self, cfg: &RunConfig, metrics: &RunMetrics) -> Result<(), TrainError> {
        self.trace.flush()?;
        std::fs::write(self.dir.join("metrics.csv"), metrics.to_csv())?;
        std::fs::write(self.dir.join("config.toml"), cfg.to_toml())?;
        Ok(())
    }
}

/// Records every step to the trace file while delegating to `inner`.
struct Traced<'a, E: ?Sized> {
    inner: &'a mut E,
    trace: Option<&'a mut BufWriter<File>>,
    episode: usize,
    theta: f64,
}

impl<E: Environment + ?Sized> Environment for Traced<'_, E> {
    fn obs_dim(&self) -> usize {
        self.inner.obs_dim()
    }

    fn reset_heading(&mut self, offset: f64) -> Result<super::ResetOutcome, TrainError> {
        let r = self.inner.reset_heading(offset)?;
        self.theta = r.theta;
        Ok(r)
    }

    fn step(&mut self, action: &[f64]) -> Result<super::StepOutcome, TrainError> {
        let s = self.inner.step(action)?;
        if let Some(t) = self.trace.as_deref_mut() {
            writeln!(
                t,
                "{},{},{},{},{},{},{}",
                self.episode, s.sim_time, s.pose.x, s.pose.y, s.pose.yaw, self.theta, s.reward
            )?;
        }
        Ok(s)
    }
}

/// Trains one run against `env`.
///
/// With `out_dir`, writes `metrics.csv`, `trace.csv`, `config.toml`, one
/// checkpoint per evaluation and `best.bin`. If the environment fails
/// mid-run, the current state is saved to `checkpoints/interrupted.bin`
/// before the error is returned.
pub fn train<E: Environment + ?Sized>(
    cfg: &RunConfig,
    env: &mut E,
    out_dir: Option<&Path>,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate().map_err(|e| TrainError::Config(e.to_string()))?;
    let started = Instant::now();
    let strategy: ResetStrategy = cfg.strategy.strategy();
    let mut learner = Learner::new(cfg, env.obs_dim())?;
    let mut reset_rng = stream(cfg.train.seed, Stream::Reset);
    let mut sink = out_dir.map(Sink::open).transpose()?;
    let mut metrics = RunMetrics {
        seed: cfg.train.seed,
        config_hash: cfg.hash(),
        ..RunMetrics::default()
    };
    let mut best: Option<RunCheckpoint> = None;
    let steps = cfg.train.steps_per_episode;

    for episode in 0..cfg.train.episodes {
        let mut traced = Traced {
            inner: &mut *env,
            trace: sink.as_mut().map(|s| &mut s.trace),
            episode,
            theta: 0.0,
        };
        let out = match run_episode(&mut learner, &mut traced, &strategy, &mut reset_rng, steps, true) {
            Ok(out) => out,
            Err(e) => {
                warn!("episode {episode} aborted: {e}");
                if let Some(s) = sink.take() {
                    let ck = RunCheckpoint::new(cfg, episode as u64, &learner.encoder, &learner.agent);
                    ck.save(&s.dir.join("checkpoints").join("interrupted.bin"))?;
                    metrics.wall_clock_secs = started.elapsed().as_secs_f64();
                    s.finish(cfg, &metrics)?;
                }
                return Err(e);
            }
        };
        metrics.training_steps += out.steps;
        metrics.interventions += out.interventions;
        if out.early_terminated {
            metrics.early_terminations += 1;
            metrics.shortfall += steps - out.steps;
        }
        metrics.step_rewards.extend_from_slice(&out.rewards);
        let mut row = EpisodeRow {
            episode,
            steps: out.steps,
            ret: out.ret,
            discounted: out.discounted,
            interventions: out.interventions,
            eval_score: None,
        };

        let done = episode + 1;
        if cfg.train.eval_every > 0 && done % cfg.train.eval_every == 0 {
            let score = evaluate_policy(cfg, &learner.agent, &learner.encoder)?;
            row.eval_score = Some(score);
            let ck = RunCheckpoint::new(cfg, done as u64, &learner.encoder, &learner.agent);
            let path = match &sink {
                Some(s) => {
                    let p = s.dir.join("checkpoints").join(format!("ckpt_{done:05}.bin"));
                    ck.save(&p)?;
                    Some(p)
                }
                None => None,
            };
            info!("seed {} episode {done}: eval {score:.3}", cfg.train.seed);
            let improves = metrics.evals.last().is_none()
                || metrics.evals.iter().all(|e| score >= e.score);
            metrics.evals.push(EvalRecord {
                episode: done,
                score,
                checkpoint: path,
            });
            if improves {
                best = Some(ck);
            }
        }
        metrics.rows.push(row);
    }

    let best_index = if metrics.evals.is_empty() {
        None
    } else {
        Some(select_best(&metrics.evals)?)
    };
    metrics.wall_clock_secs = started.elapsed().as_secs_f64();
    if let Some(s) = sink {
        if let Some(b) = &best {
            b.save(&s.dir.join("best.bin"))?;
        }
        s.finish(cfg, &metrics)?;
    }
    Ok(TrainOutcome {
        metrics,
        best,
        best_index,
        learner,
    })
}

/// The simulator a run trains against. Sensor/actuation noise, if
/// configured, is seeded from the run seed.
pub fn training_env(cfg: &RunConfig) -> Result<SimEnv, TrainError> {
    let mut noise = cfg.noise;
    noise.seed = noise.seed.wrapping_add(sub_seed(cfg.train.seed, Stream::SimNoise));
    Ok(SimEnv::from_config(cfg, noise)?)
}

pub fn train_in_process(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<TrainOutcome, TrainError> {
    let mut env = training_env(cfg)?;
    train(cfg, &mut env, out_dir)
}
