use serde::{Deserialize, Serialize};

/// Weights of the five reward terms. Defaults give
/// `R = Δd + Δyaw − 0.1·|yaw| − 0.1·|roll| − current`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub distance: f64,
    pub yaw_change: f64,
    pub yaw: f64,
    pub roll: f64,
    pub current: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            distance: 1.0,
            yaw_change: 1.0,
            yaw: 0.1,
            roll: 0.1,
            current: 1.0,
        }
    }
}

/// `Δd + (|e_prev| − |e|) − 0.1·|e| − 0.1·|roll| − current` under default
/// weights, where `e` is the wrapped yaw error to the heading. The turning
/// term is positive exactly when the robot rotated toward the heading.
pub fn compute_reward(
    weights: &RewardWeights,
    delta_d: f64,
    yaw_err_prev: f64,
    yaw_err: f64,
    roll: f64,
    current: f64,
) -> f64 {
    weights.distance * delta_d + weights.yaw_change * (yaw_err_prev.abs() - yaw_err.abs())
        - weights.yaw * yaw_err.abs()
        - weights.roll * roll.abs()
        - weights.current * current
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let r = compute_reward(&RewardWeights::default(), 0.01, 0.25, 0.20, 0.1, 0.0);
        assert!((r - 0.03).abs() < 1e-12);
    }

    #[test]
    fn null_step_is_zero() {
        assert_eq!(compute_reward(&RewardWeights::default(), 0.0, 0.0, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn zero_weight_removes_term() {
        let full = RewardWeights::default();
        let args = (0.03, -0.4, 0.3, -0.05, 0.02);
        let eval = |w: &RewardWeights| compute_reward(w, args.0, args.1, args.2, args.3, args.4);
        let base = eval(&full);
        let terms = [
            ("distance", 0.03),
            ("yaw_change", 0.4 - 0.3),
            ("yaw", -0.1 * 0.3),
            ("roll", -0.1 * 0.05),
            ("current", -0.02),
        ];
        for (name, term) in terms {
            let mut w = full;
            match name {
                "distance" => w.distance = 0.0,
                "yaw_change" => w.yaw_change = 0.0,
                "yaw" => w.yaw = 0.0,
                "roll" => w.roll = 0.0,
                _ => w.current = 0.0,
            }
            assert!((base - eval(&w) - term).abs() < 1e-15, "{name}");
        }
    }
}
