use std::f64::consts::FRAC_PI_3;

use serde::{Deserialize, Serialize};

use super::SimError;

pub const NUM_LEGS: usize = 4;
pub const NUM_SERVOS: usize = 8;

/// Leg order: front-left, front-right, rear-left, rear-right. Servo `2·leg`
/// drives the thigh and `2·leg + 1` the knee.
pub const LEFT_LEGS: [usize; 2] = [0, 2];
pub const RIGHT_LEGS: [usize; 2] = [1, 3];

/// Dimensions and joint limits of the surrogate robot. Values are plausible
/// for a desk-sized 8-servo quadruped, not measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotGeometry {
    pub thigh_len: f64,
    pub shank_len: f64,
    pub body_length: f64,
    pub track_width: f64,
    pub servo_min: [f64; NUM_SERVOS],
    pub servo_max: [f64; NUM_SERVOS],
    pub stance_tolerance: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        Self {
            thigh_len: 0.1,
            shank_len: 0.1,
            body_length: 0.3,
            track_width: 0.2,
            servo_min: [-FRAC_PI_3; NUM_SERVOS],
            servo_max: [FRAC_PI_3; NUM_SERVOS],
            stance_tolerance: 0.005,
        }
    }
}

impl RobotGeometry {
    pub fn validate(&self) -> Result<(), SimError> {
        let lengths = [
            self.thigh_len,
            self.shank_len,
            self.body_length,
            self.track_width,
        ];
        if lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(SimError::Config("link and body lengths must be positive".into()));
        }
        if !(self.stance_tolerance >= 0.0) {
            return Err(SimError::Config("stance tolerance must be non-negative".into()));
        }
        for i in 0..NUM_SERVOS {
            if !(self.servo_min[i] < self.servo_max[i]) {
                return Err(SimError::Config(format!("servo {i}: min must be below max")));
            }
        }
        Ok(())
    }

    /// Hip position of a leg in the body frame (x forward, y left).
    pub fn hip(&self, leg: usize) -> (f64, f64) {
        let x = if leg < 2 { self.body_length / 2.0 } else { -self.body_length / 2.0 };
        let y = if leg % 2 == 0 { self.track_width / 2.0 } else { -self.track_width / 2.0 };
        (x, y)
    }

    pub fn reach(&self) -> f64 {
        self.thigh_len + self.shank_len
    }

    /// Body-frame `(longitudinal, height)` of every foot for the given servo
    /// angles.
    pub fn feet(&self, servo_pos: &[f64; NUM_SERVOS]) -> [[f64; 2]; NUM_LEGS] {
        let mut out = [[0.0; 2]; NUM_LEGS];
        for (leg, foot) in out.iter_mut().enumerate() {
            let (hx, _) = self.hip(leg);
            let (fx, fz) = leg_forward_kinematics(self, servo_pos[2 * leg], servo_pos[2 * leg + 1]);
            *foot = [hx + fx, fz];
        }
        out
    }
}

/// Foot position relative to the hip in the leg's sagittal plane, with the
/// thigh angle measured from straight down and the knee relative to the
/// thigh: `l1·(sin t, −cos t) + l2·(sin(t+k), −cos(t+k))`.
pub fn leg_forward_kinematics(geom: &RobotGeometry, thigh: f64, knee: f64) -> (f64, f64) {
    let (l1, l2) = (geom.thigh_len, geom.shank_len);
    (
        l1 * thigh.sin() + l2 * (thigh + knee).sin(),
        -l1 * thigh.cos() - l2 * (thigh + knee).cos(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_angles_extend_straight_down() {
        let g = RobotGeometry::default();
        let (x, z) = leg_forward_kinematics(&g, 0.0, 0.0);
        assert_eq!((x, z), (0.0, -0.2));
    }

    #[test]
    fn quarter_turn() {
        let g = RobotGeometry::default();
        let (x, z) = leg_forward_kinematics(&g, FRAC_PI_2, 0.0);
        assert!((x - 0.2).abs() < 1e-15 && z.abs() < 1e-15);
    }

    #[test]
    fn validation_catches_bad_geometry() {
        let mut g = RobotGeometry::default();
        assert!(g.validate().is_ok());
        g.track_width = 0.0;
        assert!(g.validate().is_err());
        let mut g = RobotGeometry::default();
        g.servo_min[3] = 2.0;
        assert!(g.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn reach_is_bounded(t in -3.0f64..3.0, k in -3.0f64..3.0) {
            let g = RobotGeometry::default();
            let (x, z) = leg_forward_kinematics(&g, t, k);
            let d = (x * x + z * z).sqrt();
            proptest::prop_assert!(d <= g.reach() + 1e-15);
            let (sx, sz) = leg_forward_kinematics(&g, t, 0.0);
            proptest::prop_assert!(((sx * sx + sz * sz).sqrt() - g.reach()).abs() < 1e-15);
            if k.abs() > 1e-3 {
                proptest::prop_assert!(d < g.reach());
            }
        }
    }
}
