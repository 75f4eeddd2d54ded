use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::TrainError;
use crate::angle::wrap;

/// How a new heading is chosen at each episode reset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetStrategy {
    /// Heading set to the current yaw.
    ToYaw,
    /// Current yaw plus `ε ~ U[-bound, +bound]`.
    UniformEps { bound: f64 },
    /// Current yaw plus `ε ~ N(mu, sigma²)`, unclipped.
    NormalEps { mu: f64, sigma: f64 },
}

impl ResetStrategy {
    pub fn validate(&self) -> Result<(), TrainError> {
        match *self {
            ResetStrategy::ToYaw => Ok(()),
            ResetStrategy::UniformEps { bound } if bound > 0.0 => Ok(()),
            ResetStrategy::NormalEps { mu, sigma } if sigma > 0.0 && mu.is_finite() => Ok(()),
            other => Err(TrainError::Config(format!("invalid reset strategy {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResetStrategy::ToYaw => "yaw",
            ResetStrategy::UniformEps { .. } => "uniform",
            ResetStrategy::NormalEps { .. } => "normal",
        }
    }

    /// Draws the heading offset ε. `ToYaw` consumes no randomness.
    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ResetStrategy::ToYaw => 0.0,
            ResetStrategy::UniformEps { bound } => rng.gen_range(-bound..=bound),
            ResetStrategy::NormalEps { mu, sigma } => Normal::new(mu, sigma).expect("validated sigma").sample(rng),
        }
    }
}

/// New heading `θ = wrap(yaw + ε)`.
pub fn reset_heading<R: Rng + ?Sized>(strategy: &ResetStrategy, current_yaw: f64, rng: &mut R) -> f64 {
    wrap(current_yaw + strategy.sample_offset(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn to_yaw_is_identity() {
        let th = reset_heading(&ResetStrategy::ToYaw, 0.7, &mut seeded(0));
        assert_eq!(th, 0.7);
        assert_eq!(wrap(th - 0.7), 0.0);
    }

    #[test]
    fn uniform_respects_bound() {
        let s = ResetStrategy::UniformEps { bound: FRAC_PI_4 };
        let mut rng = seeded(1);
        for k in 0..10_000 {
            let yaw = wrap(k as f64 * 0.37);
            let th = reset_heading(&s, yaw, &mut rng);
            assert!(wrap(th - yaw).abs() <= FRAC_PI_4 + 1e-12);
        }
    }

    #[test]
    fn normal_moments_and_tails() {
        let s = ResetStrategy::NormalEps {
            mu: 0.0,
            sigma: FRAC_PI_4,
        };
        let mut rng = seeded(2);
        let n = 10_000;
        let eps: Vec<f64> = (0..n).map(|_| s.sample_offset(&mut rng)).collect();
        let mean = eps.iter().sum::<f64>() / n as f64;
        let var = eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 * FRAC_PI_4 / (n as f64).sqrt());
        assert!((var.sqrt() - FRAC_PI_4).abs() < 0.05 * FRAC_PI_4);
        assert!(eps.iter().any(|e| e.abs() > FRAC_PI_2));
    }

    #[test]
    fn invalid_parameters() {
        assert!(ResetStrategy::UniformEps { bound: 0.0 }.validate().is_err());
        assert!(ResetStrategy::NormalEps { mu: 0.0, sigma: -1.0 }.validate().is_err());
        assert!(ResetStrategy::ToYaw.validate().is_ok());
    }
}
