use serde::{Deserialize, Serialize};

use super::geometry::NUM_SERVOS;
use super::SimError;

/// Toggles for the observation components, in canonical order:
/// `[dt, Δd, current, yaw_err, Δyaw_err, roll, servo_pos × 8]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObsConfig {
    pub time_since_action: bool,
    pub distance: bool,
    pub current: bool,
    pub yaw_error: bool,
    pub yaw_error_change: bool,
    pub roll: bool,
    pub servo_positions: bool,
    /// Current readings below this are reported as zero.
    pub current_threshold: f64,
}

impl Default for ObsConfig {
    fn default() -> Self {
        Self {
            time_since_action: true,
            distance: true,
            current: true,
            yaw_error: true,
            yaw_error_change: true,
            roll: true,
            servo_positions: true,
            current_threshold: 0.0,
        }
    }
}

/// Raw sensor values before selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readings {
    pub dt: f64,
    pub delta_d: f64,
    pub current: f64,
    pub yaw_err: f64,
    pub yaw_err_change: f64,
    pub roll: f64,
    pub servo_pos: [f64; NUM_SERVOS],
}

impl ObsConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let any = self.time_since_action
            || self.distance
            || self.current
            || self.yaw_error
            || self.yaw_error_change
            || self.roll
            || self.servo_positions;
        if !any {
            return Err(SimError::Config("at least one observation component must be enabled".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        [
            self.time_since_action,
            self.distance,
            self.current,
            self.yaw_error,
            self.yaw_error_change,
            self.roll,
        ]
        .iter()
        .filter(|b| **b)
        .count()
            + if self.servo_positions { NUM_SERVOS } else { 0 }
    }

    /// Concatenates the enabled components in canonical order.
    pub fn assemble(&self, r: &Readings) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let current = if r.current >= self.current_threshold { r.current } else { 0.0 };
        let scalars = [
            (self.time_since_action, r.dt),
            (self.distance, r.delta_d),
            (self.current, current),
            (self.yaw_error, r.yaw_err),
            (self.yaw_error_change, r.yaw_err_change),
            (self.roll, r.roll),
        ];
        out.extend(scalars.iter().filter(|(on, _)| *on).map(|(_, v)| *v));
        if self.servo_positions {
            out.extend_from_slice(&r.servo_pos);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn readings() -> Readings {
        Readings {
            dt: 0.05,
            delta_d: 0.01,
            current: 0.3,
            yaw_err: -0.2,
            yaw_err_change: 0.05,
            roll: 0.01,
            servo_pos: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
        }
    }

    #[test]
    fn arity_follows_toggles() {
        let cfg = ObsConfig::default();
        assert_eq!(cfg.dim(), 14);
        assert_eq!(cfg.assemble(&readings()).len(), 14);
        let no_servo = ObsConfig {
            servo_positions: false,
            ..cfg
        };
        assert_eq!(no_servo.dim(), 6);
        assert_eq!(no_servo.assemble(&readings()), vec![0.05, 0.01, 0.3, -0.2, 0.05, 0.01]);
    }

    #[test]
    fn current_is_gated() {
        let cfg = ObsConfig {
            current_threshold: 0.5,
            ..ObsConfig::default()
        };
        assert_eq!(cfg.assemble(&readings())[2], 0.0);
    }

    #[test]
    fn all_off_is_invalid() {
        let cfg = ObsConfig {
            time_since_action: false,
            distance: false,
            current: false,
            yaw_error: false,
            yaw_error_change: false,
            roll: false,
            servo_positions: false,
            current_threshold: 0.0,
        };
        assert!(cfg.validate().is_err());
    }
}
