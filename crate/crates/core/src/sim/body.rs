//! Stance-based body motion.
//!
//! Feet within `stance_tolerance` of the lowest foot are treated as planted.
//! Planted feet do not slip, so their longitudinal displacement in the body
//! frame is the negative of the body's motion: the per-side mean drives a
//! differential-drive style update of the planar pose.

use super::geometry::{RobotGeometry, LEFT_LEGS, NUM_LEGS, RIGHT_LEGS};
use super::Pose;
use crate::angle::wrap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyUpdate {
    pub pose: Pose,
    /// Body-frame forward travel this step.
    pub forward: f64,
    pub delta_yaw: f64,
    /// World displacement projected onto the heading.
    pub delta_d: f64,
    pub roll: f64,
    pub stance: [bool; NUM_LEGS],
}

pub fn stance_set(geom: &RobotGeometry, feet: &[[f64; 2]; NUM_LEGS]) -> [bool; NUM_LEGS] {
    let lowest = feet.iter().map(|f| f[1]).fold(f64::INFINITY, f64::min);
    let mut out = [false; NUM_LEGS];
    for (s, f) in out.iter_mut().zip(feet) {
        *s = f[1] - lowest <= geom.stance_tolerance;
    }
    out
}

fn side_mean(legs: [usize; 2], stance: &[bool; NUM_LEGS], value: impl Fn(usize) -> f64) -> Option<f64> {
    let planted: Vec<f64> = legs.iter().filter(|&&l| stance[l]).map(|&l| value(l)).collect();
    if planted.is_empty() {
        None
    } else {
        Some(planted.iter().sum::<f64>() / planted.len() as f64)
    }
}

/// Moves the body given previous and new body-frame foot positions
/// (`[longitudinal, height]` per leg).
///
/// With only one side planted the other side is assumed to follow it, which
/// yields a pure translation. Roll uses the mean planted height per side,
/// falling back to a side's lowest foot when none of its feet are planted.
pub fn body_update(
    geom: &RobotGeometry,
    pose: Pose,
    heading: f64,
    feet_prev: &[[f64; 2]; NUM_LEGS],
    feet_new: &[[f64; 2]; NUM_LEGS],
) -> BodyUpdate {
    let stance = stance_set(geom, feet_new);
    let slide = |l: usize| feet_new[l][0] - feet_prev[l][0];
    let left = side_mean(LEFT_LEGS, &stance, slide);
    let right = side_mean(RIGHT_LEGS, &stance, slide);
    let (p_left, p_right) = match (left, right) {
        (Some(l), Some(r)) => (l, r),
        (Some(l), None) => (l, l),
        (None, Some(r)) => (r, r),
        (None, None) => {
            return BodyUpdate {
                pose,
                forward: 0.0,
                delta_yaw: 0.0,
                delta_d: 0.0,
                roll: 0.0,
                stance,
            }
        }
    };
    let forward = -(p_left + p_right) / 2.0;
    let delta_yaw = -(p_right - p_left) / geom.track_width;
    let (dx, dy) = (forward * pose.yaw.cos(), forward * pose.yaw.sin());
    let next = Pose {
        x: pose.x + dx,
        y: pose.y + dy,
        yaw: wrap(pose.yaw + delta_yaw),
    };
    let delta_d = dx * heading.cos() + dy * heading.sin();

    let height = |l: usize| feet_new[l][1];
    let lowest = |legs: [usize; 2]| legs.iter().map(|&l| feet_new[l][1]).fold(f64::INFINITY, f64::min);
    let h_left = side_mean(LEFT_LEGS, &stance, height).unwrap_or_else(|| lowest(LEFT_LEGS));
    let h_right = side_mean(RIGHT_LEGS, &stance, height).unwrap_or_else(|| lowest(RIGHT_LEGS));
    let roll = ((h_left - h_right) / geom.track_width).atan();

    BodyUpdate {
        pose: next,
        forward,
        delta_yaw,
        delta_d,
        roll,
        stance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn flat(x: [f64; 4]) -> [[f64; 2]; 4] {
        [[x[0], -0.2], [x[1], -0.2], [x[2], -0.2], [x[3], -0.2]]
    }

    #[test]
    fn symmetric_push_advances() {
        let g = RobotGeometry::default();
        let prev = flat([0.15, 0.15, -0.15, -0.15]);
        let new = flat([0.14, 0.14, -0.16, -0.16]);
        let u = body_update(&g, Pose::default(), 0.0, &prev, &new);
        assert!((u.pose.x - 0.01).abs() < 1e-12);
        assert!(u.pose.y.abs() < 1e-15);
        assert!(u.delta_yaw.abs() < 1e-15);
        assert!((u.delta_d - 0.01).abs() < 1e-12);
        assert_eq!(u.roll, 0.0);
    }

    #[test]
    fn antisymmetric_twist() {
        let g = RobotGeometry::default();
        let prev = flat([0.0; 4]);
        // left legs (0, 2) +0.01, right legs (1, 3) −0.01
        let new = flat([0.01, -0.01, 0.01, -0.01]);
        let u = body_update(&g, Pose::default(), 0.0, &prev, &new);
        assert!(u.forward.abs() < 1e-15);
        assert!((u.delta_yaw - 0.1).abs() < 1e-12);
    }

    #[test]
    fn projection_onto_heading() {
        let g = RobotGeometry::default();
        let prev = flat([0.0; 4]);
        let new = flat([-0.02; 4]);
        let pose = Pose { x: 0.0, y: 0.0, yaw: 0.4 };
        let aligned = body_update(&g, pose, 0.4, &prev, &new);
        assert!((aligned.delta_d - 0.02).abs() < 1e-12);
        let square = body_update(&g, pose, 0.4 + FRAC_PI_2, &prev, &new);
        assert!(square.delta_d.abs() < 1e-12);
    }

    #[test]
    fn lifted_feet_do_not_propel() {
        let g = RobotGeometry::default();
        let prev = flat([0.0; 4]);
        // legs 0 and 3 lifted by 3 cm and swung forward; 1 and 2 push back
        let new = [[0.05, -0.17], [-0.01, -0.2], [-0.01, -0.2], [0.05, -0.17]];
        let u = body_update(&g, Pose::default(), 0.0, &prev, &new);
        assert_eq!(u.stance, [false, true, true, false]);
        assert!((u.forward - 0.01).abs() < 1e-12);
        assert!(u.delta_yaw.abs() < 1e-12);
    }

    #[test]
    fn one_side_planted_is_pure_translation() {
        let g = RobotGeometry::default();
        let prev = [[0.15, -0.2], [0.15, -0.15], [-0.15, -0.2], [-0.15, -0.15]];
        let new = [[0.13, -0.2], [0.2, -0.15], [-0.17, -0.2], [-0.1, -0.15]];
        let pose = Pose { x: 0.3, y: -0.2, yaw: 1.1 };
        let u = body_update(&g, pose, 0.0, &prev, &new);
        assert_eq!(u.delta_yaw, 0.0);
        // world position of the mean planted foot is unchanged
        let world = |p: Pose, bx: f64| (p.x + bx * p.yaw.cos(), p.y + bx * p.yaw.sin());
        let before = world(pose, (prev[0][0] + prev[2][0]) / 2.0);
        let after = world(u.pose, (new[0][0] + new[2][0]) / 2.0);
        assert!((before.0 - after.0).abs() < 1e-9 && (before.1 - after.1).abs() < 1e-9);
        assert!(u.roll.abs() > 0.0);
    }
}
