//! Kinematic surrogate of the 8-servo quadruped.
//!
//! This is not a physics simulator. Servos are ideal position actuators,
//! planted feet never slip, and the body pose follows from planted-foot
//! displacement. It is cheap, deterministic, and admits walking and turning
//! gaits, which is all the training pipeline needs.

mod body;
mod geometry;
mod obs;
mod reward;

pub use body::{body_update, stance_set, BodyUpdate};
pub use geometry::{leg_forward_kinematics, RobotGeometry, LEFT_LEGS, NUM_LEGS, NUM_SERVOS, RIGHT_LEGS};
pub use obs::{ObsConfig, Readings};
pub use reward::{compute_reward, RewardWeights};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap;
use crate::rng::seeded;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulator configuration: {0}")]
    Config(String),
    #[error("action must have {expected} finite components, got {got:?}")]
    Action { expected: usize, got: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Nominal control period in seconds.
    pub control_period: f64,
    /// Exponential action filter coefficient `c`.
    pub filter_coefficient: f64,
    /// Current proxy gain κ: current = κ·Σ|Δservo|.
    pub current_gain: f64,
    pub geometry: RobotGeometry,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            control_period: 0.05,
            filter_coefficient: 0.5,
            current_gain: 0.002,
            geometry: RobotGeometry::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.geometry.validate()?;
        if !(self.control_period > 0.0) {
            return Err(SimError::Config("control period must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.filter_coefficient) {
            return Err(SimError::Config("filter coefficient must lie in [0, 1)".into()));
        }
        if !(self.current_gain >= 0.0) {
            return Err(SimError::Config("current gain must be non-negative".into()));
        }
        Ok(())
    }
}

/// Noise sources standing in for real sensors and actuators. All zeros gives
/// a bit-deterministic simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimNoise {
    pub sensor_sigma: f64,
    pub actuation_sigma: f64,
    /// Half-width of the uniform control-period jitter, seconds.
    pub dt_jitter: f64,
    pub seed: u64,
}

impl Default for SimNoise {
    fn default() -> Self {
        Self {
            sensor_sigma: 0.0,
            actuation_sigma: 0.0,
            dt_jitter: 0.0,
            seed: 0,
        }
    }
}

impl SimNoise {
    pub fn off() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.sensor_sigma >= 0.0 && self.actuation_sigma >= 0.0 && self.dt_jitter >= 0.0) {
            return Err(SimError::Config("noise scales must be non-negative".into()));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.sensor_sigma == 0.0 && self.actuation_sigma == 0.0 && self.dt_jitter == 0.0
    }
}

/// Planar pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub roll: f64,
    pub servo_pos: [f64; NUM_SERVOS],
    pub filtered_action: [f64; NUM_SERVOS],
    pub foot_prev: [[f64; 2]; NUM_LEGS],
    pub sim_time: f64,
    pub heading: f64,
    pub yaw_err_prev: f64,
}

impl RobotState {
    pub fn pose(&self) -> Pose {
        Pose {
            x: self.x,
            y: self.y,
            yaw: self.yaw,
        }
    }

    pub fn yaw_err(&self) -> f64 {
        wrap(self.heading - self.yaw)
    }
}

/// Applies `ā_t = c·ā_{t−1} + (1−c)·u_t` and maps each filtered component
/// affinely so that −1 ↦ servo_min and +1 ↦ servo_max.
///
/// Components outside `[-1, 1]` are clamped first; the return flag reports
/// whether that happened.
pub fn filter_and_map_action(
    geom: &RobotGeometry,
    filtered: &mut [f64; NUM_SERVOS],
    u: &[f64; NUM_SERVOS],
    c: f64,
) -> ([f64; NUM_SERVOS], bool) {
    let mut clamped = false;
    let mut targets = [0.0; NUM_SERVOS];
    for i in 0..NUM_SERVOS {
        let ui = u[i].clamp(-1.0, 1.0);
        clamped |= ui != u[i];
        filtered[i] = filtered[i] * c + ui * (1.0 - c);
        let (lo, hi) = (geom.servo_min[i], geom.servo_max[i]);
        targets[i] = lo + (filtered[i] + 1.0) * 0.5 * (hi - lo);
    }
    (targets, clamped)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub dt: f64,
    pub delta_d: f64,
    pub yaw_err: f64,
    pub roll: f64,
    pub current: f64,
}

#[derive(Debug, Clone)]
pub struct Sim {
    config: SimConfig,
    obs_config: ObsConfig,
    reward: RewardWeights,
    noise: SimNoise,
    rng: ChaCha8Rng,
    state: RobotState,
    clamp_events: u64,
}

impl Sim {
    pub fn new(config: SimConfig, obs_config: ObsConfig, reward: RewardWeights, noise: SimNoise) -> Result<Self, SimError> {
        config.validate()?;
        obs_config.validate()?;
        noise.validate()?;
        let servo_pos = [0.0; NUM_SERVOS];
        let foot_prev = config.geometry.feet(&servo_pos);
        Ok(Self {
            rng: seeded(noise.seed),
            state: RobotState {
                x: 0.0,
                y: 0.0,
                yaw: 0.0,
                roll: 0.0,
                servo_pos,
                filtered_action: [0.0; NUM_SERVOS],
                foot_prev,
                sim_time: 0.0,
                heading: 0.0,
                yaw_err_prev: 0.0,
            },
            config,
            obs_config,
            reward,
            noise,
            clamp_events: 0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn obs_config(&self) -> &ObsConfig {
        &self.obs_config
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_config.dim()
    }

    pub fn state(&self) -> &RobotState {
        &self.state
    }

    pub fn pose(&self) -> Pose {
        self.state.pose()
    }

    /// Number of steps whose raw action had to be clamped into `[-1, 1]`.
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// Replaces the noise model and reseeds the noise stream.
    pub fn set_noise(&mut self, noise: SimNoise) -> Result<(), SimError> {
        noise.validate()?;
        self.rng = seeded(noise.seed);
        self.noise = noise;
        Ok(())
    }

    /// Teleports the body; joints and heading are untouched.
    pub fn place(&mut self, pose: Pose) {
        self.state.x = pose.x;
        self.state.y = pose.y;
        self.state.yaw = wrap(pose.yaw);
        self.state.yaw_err_prev = self.state.yaw_err();
    }

    /// Sets a new heading and returns a fresh observation for it. The yaw
    /// error history restarts so the first `Δyaw_err` is zero.
    pub fn set_heading(&mut self, theta: f64) -> Vec<f64> {
        self.state.heading = wrap(theta);
        let e = self.state.yaw_err();
        self.state.yaw_err_prev = e;
        let readings = Readings {
            dt: self.config.control_period,
            delta_d: 0.0,
            current: 0.0,
            yaw_err: e,
            yaw_err_change: 0.0,
            roll: self.state.roll,
            servo_pos: self.state.servo_pos,
        };
        self.observe(&readings)
    }

    fn observe(&mut self, readings: &Readings) -> Vec<f64> {
        let mut obs = self.obs_config.assemble(readings);
        if self.noise.sensor_sigma > 0.0 {
            let n = Normal::new(0.0, self.noise.sensor_sigma).expect("validated sigma");
            for v in &mut obs {
                *v += n.sample(&mut self.rng);
            }
        }
        obs
    }

    /// Filter → servos → kinematics → body update → reward → observation.
    pub fn step(&mut self, action: &[f64]) -> Result<StepResult, SimError> {
        if action.len() != NUM_SERVOS || action.iter().any(|a| !a.is_finite()) {
            return Err(SimError::Action {
                expected: NUM_SERVOS,
                got: action.to_vec(),
            });
        }
        let u: [f64; NUM_SERVOS] = action.try_into().expect("length checked");
        let geom = &self.config.geometry;
        let (targets, clamped) = filter_and_map_action(
            geom,
            &mut self.state.filtered_action,
            &u,
            self.config.filter_coefficient,
        );
        if clamped {
            self.clamp_events += 1;
            log::debug!("action {action:?} clamped into [-1, 1]");
        }

        let mut servo = targets;
        if self.noise.actuation_sigma > 0.0 {
            let n = Normal::new(0.0, self.noise.actuation_sigma).expect("validated sigma");
            for (i, s) in servo.iter_mut().enumerate() {
                *s = (*s + n.sample(&mut self.rng)).clamp(geom.servo_min[i], geom.servo_max[i]);
            }
        }
        let travel: f64 = servo.iter().zip(&self.state.servo_pos).map(|(a, b)| (a - b).abs()).sum();
        let current = self.config.current_gain * travel;

        let feet = geom.feet(&servo);
        let moved = body_update(geom, self.state.pose(), self.state.heading, &self.state.foot_prev, &feet);
        let st = &mut self.state;
        st.servo_pos = servo;
        st.foot_prev = feet;
        st.x = moved.pose.x;
        st.y = moved.pose.y;
        st.yaw = moved.pose.yaw;
        st.roll = moved.roll;

        let yaw_err = st.yaw_err();
        let yaw_err_prev = st.yaw_err_prev;
        let reward = compute_reward(&self.reward, moved.delta_d, yaw_err_prev, yaw_err, moved.roll, current);

        let mut dt = self.config.control_period;
        if self.noise.dt_jitter > 0.0 {
            let j = self.noise.dt_jitter;
            dt += self.rng.gen_range(-j..=j);
        }
        st.sim_time += dt;
        st.yaw_err_prev = yaw_err;

        let readings = Readings {
            dt,
            delta_d: moved.delta_d,
            current,
            yaw_err,
            yaw_err_change: wrap(yaw_err - yaw_err_prev),
            roll: moved.roll,
            servo_pos: servo,
        };
        let obs = self.observe(&readings);
        Ok(StepResult {
            obs,
            reward,
            dt,
            delta_d: moved.delta_d,
            yaw_err,
            roll: moved.roll,
            current,
        })
    }
}

/// Open-loop diagonal trot: each diagonal pair sweeps its thighs backward
/// while planted and swings them forward with bent knees, half a cycle out
/// of phase with the other pair. `turn` in `[-1, 1]` shortens the stride on
/// one side to steer (positive turns left).
pub fn trot_action(phase: f64, amplitude: f64, knee_lift: f64, turn: f64) -> [f64; NUM_SERVOS] {
    let mut a = [0.0; NUM_SERVOS];
    for leg in 0..NUM_LEGS {
        let offset = if leg == 0 || leg == 3 { 0.0 } else { std::f64::consts::PI };
        let p = phase + offset;
        let side_scale = if leg % 2 == 0 { 1.0 - turn } else { 1.0 + turn };
        a[2 * leg] = (amplitude * side_scale.clamp(0.0, 2.0) * p.cos()).clamp(-1.0, 1.0);
        a[2 * leg + 1] = (knee_lift * (-p.sin()).max(0.0)).clamp(-1.0, 1.0);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(noise: SimNoise) -> Sim {
        Sim::new(SimConfig::default(), ObsConfig::default(), RewardWeights::default(), noise).unwrap()
    }

    #[test]
    fn filter_at_paper_coefficient() {
        let g = RobotGeometry::default();
        let mut f = [0.0; NUM_SERVOS];
        filter_and_map_action(&g, &mut f, &[1.0; NUM_SERVOS], 0.5);
        assert_eq!(f, [0.5; NUM_SERVOS]);
    }

    #[test]
    fn filter_disabled_at_zero() {
        let g = RobotGeometry::default();
        let mut f = [0.3; NUM_SERVOS];
        let u = [-0.7, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 1.0];
        let (t, _) = filter_and_map_action(&g, &mut f, &u, 0.0);
        assert_eq!(f, u);
        assert_eq!(t[7], g.servo_max[7]);
    }

    #[test]
    fn filter_converges_geometrically() {
        let g = RobotGeometry::default();
        let mut f = [0.0; NUM_SERVOS];
        let u = [0.9, -0.9, 0.3, -0.3, 1.0, -1.0, 0.0, 0.5];
        for _ in 0..20 {
            filter_and_map_action(&g, &mut f, &u, 0.5);
        }
        for i in 0..NUM_SERVOS {
            // geometric series: |ā − u| = |u|·2⁻²⁰
            let oracle = u[i].abs() * 2f64.powi(-20);
            assert!(((f[i] - u[i]).abs() - oracle).abs() < 1e-15);
            // equality only at the saturated ends u = ±1
            assert!((f[i] - u[i]).abs() < 2f64.powi(-20) || u[i].abs() == 1.0);
        }
    }

    #[test]
    fn out_of_range_action_is_clamped() {
        let mut s = sim(SimNoise::off());
        s.step(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.clamp_events(), 1);
        assert_eq!(s.state().filtered_action[0], 0.5);
        assert!(s.step(&[0.0; 3]).is_err());
        assert!(s.step(&[f64::NAN; 8]).is_err());
    }

    #[test]
    fn resting_step_only_pays_alignment() {
        let mut s = sim(SimNoise::off());
        s.place(Pose { x: 0.0, y: 0.0, yaw: 0.3 });
        s.set_heading(0.0);
        let r = s.step(&[0.0; NUM_SERVOS]).unwrap();
        assert_eq!(r.delta_d, 0.0);
        assert!((r.reward - (-0.1 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn aligned_heading_has_zero_error() {
        let mut s = sim(SimNoise::off());
        s.place(Pose { x: 1.0, y: 1.0, yaw: 0.7 });
        let obs = s.set_heading(0.7);
        assert_eq!(obs[3], 0.0);
    }

    #[test]
    fn noisy_sims_are_reproducible() {
        let noise = SimNoise {
            sensor_sigma: 0.01,
            actuation_sigma: 0.02,
            dt_jitter: 0.005,
            seed: 9,
        };
        let mut a = sim(noise);
        let mut b = sim(noise);
        for k in 0..100 {
            let act = trot_action(k as f64 * 0.6, 0.5, 0.8, 0.0);
            assert_eq!(a.step(&act).unwrap(), b.step(&act).unwrap());
        }
        assert_eq!(a.state(), b.state());
    }

    #[test]
    fn scripted_trot_walks_forward() {
        let mut s = sim(SimNoise::off());
        s.set_heading(0.0);
        let mut total = 0.0;
        for k in 0..100 {
            total += s.step(&trot_action(k as f64 * 0.6, 0.5, 0.8, 0.0)).unwrap().delta_d;
        }
        assert!(total > 0.0, "net forward displacement {total}");
        assert!(s.pose().x > 0.0);
    }

    #[test]
    fn yaw_stays_wrapped_while_spinning() {
        let mut s = sim(SimNoise::off());
        for k in 0..400 {
            s.step(&trot_action(k as f64 * 0.6, 0.5, 0.8, 1.0)).unwrap();
            let yaw = s.pose().yaw;
            assert!(yaw > -std::f64::consts::PI && yaw <= std::f64::consts::PI);
        }
    }
}
