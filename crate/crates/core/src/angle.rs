//! Angle helpers.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `(-π, π]`. Angles already in range are returned
/// unchanged.
pub fn wrap(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}
