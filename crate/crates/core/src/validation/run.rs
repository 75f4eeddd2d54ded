use super::{heading_controller, HeadingCommand, Trajectory, ValidationError};
use crate::angle::wrap;
use crate::nn::{GruEncoder, Mlp};
use crate::sim::{Pose, Sim, SimNoise, NUM_SERVOS};
use crate::trainer::{encode_state, RunCheckpoint};

/// The robot side of a validation run.
pub trait Plant {
    fn obs_dim(&self) -> usize;
    fn place(&mut self, pose: Pose);
    fn pose(&self) -> Pose;
    /// Installs a new commanded heading and returns the fresh observation.
    fn set_heading(&mut self, theta: f64) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> Result<Vec<f64>, ValidationError>;
    fn time(&self) -> f64;
}

impl Plant for Sim {
    fn obs_dim(&self) -> usize {
        Sim::obs_dim(self)
    }

    fn place(&mut self, pose: Pose) {
        Sim::place(self, pose)
    }

    fn pose(&self) -> Pose {
        Sim::pose(self)
    }

    fn set_heading(&mut self, theta: f64) -> Vec<f64> {
        Sim::set_heading(self, theta)
    }

    fn step(&mut self, action: &[f64]) -> Result<Vec<f64>, ValidationError> {
        Ok(Sim::step(self, action)?.obs)
    }

    fn time(&self) -> f64 {
        self.state().sim_time
    }
}

/// A point that moves `speed · action[0] · dt` along the commanded heading
/// each step. Used to check the harness with a perfect walker.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPlant {
    pub speed: f64,
    pub dt: f64,
    pose: Pose,
    theta: f64,
    time: f64,
}

impl PointPlant {
    pub fn new(speed: f64, dt: f64) -> Self {
        Self {
            speed,
            dt,
            pose: Pose::default(),
            theta: 0.0,
            time: 0.0,
        }
    }
}

impl Plant for PointPlant {
    fn obs_dim(&self) -> usize {
        1
    }

    fn place(&mut self, pose: Pose) {
        self.pose = pose;
    }

    fn pose(&self) -> Pose {
        self.pose
    }

    fn set_heading(&mut self, theta: f64) -> Vec<f64> {
        self.theta = theta;
        self.pose.yaw = theta;
        vec![0.0]
    }

    fn step(&mut self, action: &[f64]) -> Result<Vec<f64>, ValidationError> {
        let v = action.first().copied().unwrap_or(0.0).clamp(-1.0, 1.0) * self.speed;
        self.pose.x += v * self.dt * self.theta.cos();
        self.pose.y += v * self.dt * self.theta.sin();
        self.time += self.dt;
        Ok(vec![v * self.dt])
    }

    fn time(&self) -> f64 {
        self.time
    }
}

pub trait Policy {
    fn obs_dim(&self) -> usize;
    /// Called whenever a new heading is installed.
    fn reset(&mut self);
    fn act(&mut self, obs: &[f64]) -> Result<Vec<f64>, ValidationError>;
}

/// Deterministic actor behind the fixed encoder.
#[derive(Debug, Clone)]
pub struct TrainedPolicy {
    pub encoder: GruEncoder,
    pub actor: Mlp,
}

impl TrainedPolicy {
    pub fn from_checkpoint(ck: &RunCheckpoint) -> Self {
        Self {
            encoder: ck.encoder.clone(),
            actor: ck.agent.actor().clone(),
        }
    }
}

impl Policy for TrainedPolicy {
    fn obs_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    fn reset(&mut self) {
        self.encoder.reset();
    }

    fn act(&mut self, obs: &[f64]) -> Result<Vec<f64>, ValidationError> {
        let z = encode_state(&mut self.encoder, obs).map_err(|e| match e {
            crate::trainer::TrainError::Nn(e) => ValidationError::Nn(e),
            other => ValidationError::Trajectory(other.to_string()),
        })?;
        Ok(self.actor.forward(&z)?)
    }
}

/// Always outputs the zero action.
#[derive(Debug, Clone, Copy)]
pub struct ZeroPolicy {
    pub obs_dim: usize,
    pub action_dim: usize,
}

impl ZeroPolicy {
    pub fn for_sim(obs_dim: usize) -> Self {
        Self {
            obs_dim,
            action_dim: NUM_SERVOS,
        }
    }
}

impl Policy for ZeroPolicy {
    fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    fn reset(&mut self) {}

    fn act(&mut self, _obs: &[f64]) -> Result<Vec<f64>, ValidationError> {
        Ok(vec![0.0; self.action_dim])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub max_time: f64,
    /// Net displacement below this over `stall_window` seconds is a stall.
    pub stall_distance: f64,
    pub stall_window: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            max_time: 180.0,
            stall_distance: 0.01,
            stall_window: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub theta: f64,
    pub active: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intervention {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub trajectory: Trajectory,
    pub completed: bool,
    pub waypoints_reached: usize,
    pub total_waypoints: usize,
    pub trace: Vec<TracePoint>,
    pub interventions: Vec<Intervention>,
    pub mean_cross_track: f64,
    pub sim_time: f64,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    dist(p, (a.0 + s * dx, a.1 + s * dy))
}

const TIME_EPS: f64 = 1e-9;

/// Drives `policy` on `plant` around `trajectory`.
///
/// The robot is placed on the first waypoint facing the second. The heading
/// is refreshed every `heading_period` seconds, whenever a waypoint is
/// consumed, and after a stall; each refresh also resets the policy's
/// encoder. Platform bounds are not enforced.
pub fn run_validation<P: Policy + ?Sized, E: Plant + ?Sized>(
    policy: &mut P,
    plant: &mut E,
    trajectory: &Trajectory,
    cfg: &ValidationConfig,
) -> Result<ValidationReport, ValidationError> {
    trajectory.validate()?;
    if policy.obs_dim() != plant.obs_dim() {
        return Err(ValidationError::ObsArity {
            policy: policy.obs_dim(),
            plant: plant.obs_dim(),
        });
    }
    let targets = trajectory.targets();
    let total = targets.len();
    let (x0, y0, yaw0) = trajectory.start();
    plant.place(Pose { x: x0, y: y0, yaw: yaw0 });
    let t_start = plant.time();

    let mut active = 0usize;
    let mut trace = Vec::new();
    let mut interventions = Vec::new();
    let mut cross_track_sum = 0.0;
    let mut cross_track_n = 0usize;

    // Consume every target the robot is already on; returns true if any.
    let consume = |active: &mut usize, pos: (f64, f64)| {
        let before = *active;
        while *active < total && dist(pos, targets[*active]) <= trajectory.reach_radius {
            *active += 1;
        }
        *active != before
    };
    let steer = |active: &mut usize, pos: (f64, f64), fallback: f64| loop {
        if *active >= total {
            return fallback;
        }
        match heading_controller(pos, targets[*active]) {
            HeadingCommand::Steer(theta) => return theta,
            HeadingCommand::Advance => *active += 1,
        }
    };

    let mut theta = steer(&mut active, (x0, y0), yaw0);
    let mut obs = plant.set_heading(theta);
    policy.reset();
    let mut last_refresh = t_start;
    let mut anchor = (t_start, (x0, y0));
    trace.push(TracePoint {
        t: 0.0,
        x: x0,
        y: y0,
        yaw: wrap(yaw0),
        theta,
        active,
    });

    while active < total && plant.time() - t_start < cfg.max_time - TIME_EPS {
        let action = policy.act(&obs)?;
        obs = plant.step(&action)?;
        let pose = plant.pose();
        let pos = (pose.x, pose.y);
        let now = plant.time();

        let prev = if active == 0 { (x0, y0) } else { targets[active - 1] };
        if active < total {
            cross_track_sum += segment_distance(pos, prev, targets[active]);
            cross_track_n += 1;
        }

        let mut refresh = consume(&mut active, pos);
        if now - anchor.0 >= cfg.stall_window - TIME_EPS {
            if dist(pos, anchor.1) < cfg.stall_distance {
                interventions.push(Intervention {
                    t: now - t_start,
                    x: pos.0,
                    y: pos.1,
                });
                refresh = true;
            }
            anchor = (now, pos);
        }
        if now - last_refresh >= trajectory.heading_period - TIME_EPS {
            refresh = true;
        }
        if refresh && active < total {
            theta = steer(&mut active, pos, theta);
            obs = plant.set_heading(theta);
            policy.reset();
            last_refresh = now;
        }
        trace.push(TracePoint {
            t: now - t_start,
            x: pos.0,
            y: pos.1,
            yaw: pose.yaw,
            theta,
            active,
        });
    }

    Ok(ValidationReport {
        trajectory: trajectory.clone(),
        completed: active >= total,
        waypoints_reached: active.min(total),
        total_waypoints: total,
        trace,
        interventions,
        mean_cross_track: if cross_track_n == 0 {
            0.0
        } else {
            cross_track_sum / cross_track_n as f64
        },
        sim_time: plant.time() - t_start,
    })
}

/// Runs a checkpoint's policy on a noise-free simulator built from the
/// checkpoint's own configuration.
pub fn validate_checkpoint(
    ck: &RunCheckpoint,
    trajectory: &Trajectory,
    cfg: &ValidationConfig,
) -> Result<ValidationReport, ValidationError> {
    let c = &ck.config;
    let mut sim = Sim::new(c.sim.clone(), c.obs, c.reward, SimNoise::off())?;
    let mut policy = TrainedPolicy::from_checkpoint(ck);
    run_validation(&mut policy, &mut sim, trajectory, cfg)
}
