use super::TrainError;
use crate::angle::wrap;
use crate::config::RunConfig;
use crate::sim::{Pose, Sim, SimError, SimNoise};

/// Axis-aligned training platform `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Platform {
    pub width: f64,
    pub height: f64,
}

impl Platform {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width / 2.0, self.height / 2.0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }
}

pub fn check_bounds(pose: &Pose, platform: &Platform) -> bool {
    platform.contains(pose.x, pose.y)
}

/// Repositions the robot at the platform center, yaw preserved.
pub fn intervene(pose: Pose, platform: &Platform) -> Pose {
    let (x, y) = platform.center();
    Pose { x, y, yaw: pose.yaw }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResetOutcome {
    pub theta: f64,
    pub obs: Vec<f64>,
    pub pose: Pose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub dt: f64,
    /// The robot left the platform on this step and was repositioned.
    pub intervened: bool,
    /// Pose after the step (after repositioning, if any).
    pub pose: Pose,
    pub heading: f64,
    pub sim_time: f64,
}

/// What the trainer needs from the robot side, in-process or remote.
pub trait Environment {
    fn obs_dim(&self) -> usize;

    /// Sets the heading to `wrap(yaw + offset)` without moving the robot.
    fn reset_heading(&mut self, offset: f64) -> Result<ResetOutcome, TrainError>;

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, TrainError>;
}

/// In-process simulator with platform-bounds interventions.
#[derive(Debug, Clone)]
pub struct SimEnv {
    pub sim: Sim,
    pub platform: Platform,
    pub bounds_enabled: bool,
    interventions: u64,
}

impl SimEnv {
    /// Robot starts at the platform center facing +x.
    pub fn new(mut sim: Sim, platform: Platform) -> Self {
        let (x, y) = platform.center();
        sim.place(Pose { x, y, yaw: 0.0 });
        Self {
            sim,
            platform,
            bounds_enabled: true,
            interventions: 0,
        }
    }

    pub fn from_config(cfg: &RunConfig, noise: SimNoise) -> Result<Self, SimError> {
        let sim = Sim::new(cfg.sim.clone(), cfg.obs, cfg.reward, noise)?;
        Ok(Self::new(
            sim,
            Platform::new(cfg.train.platform_width, cfg.train.platform_height),
        ))
    }

    pub fn interventions(&self) -> u64 {
        self.interventions
    }
}

impl Environment for SimEnv {
    fn obs_dim(&self) -> usize {
        self.sim.obs_dim()
    }

    fn reset_heading(&mut self, offset: f64) -> Result<ResetOutcome, TrainError> {
        let pose = self.sim.pose();
        let theta = wrap(pose.yaw + offset);
        let obs = self.sim.set_heading(theta);
        Ok(ResetOutcome { theta, obs, pose })
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, TrainError> {
        let r = self.sim.step(action)?;
        let mut pose = self.sim.pose();
        let mut intervened = false;
        if self.bounds_enabled && !check_bounds(&pose, &self.platform) {
            pose = intervene(pose, &self.platform);
            self.sim.place(pose);
            self.interventions += 1;
            intervened = true;
        }
        let st = self.sim.state();
        Ok(StepOutcome {
            obs: r.obs,
            reward: r.reward,
            dt: r.dt,
            intervened,
            pose,
            heading: st.heading,
            sim_time: st.sim_time,
        })
    }
}
