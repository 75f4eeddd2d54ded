//! Runs a course with the validation harness and writes the CSV trace and SVG
//! plot. Uses a trained checkpoint when one is given, otherwise a scripted
//! trot that steers on the observed heading error.
//!
//! cargo run --release --example validate_course -- [line|circle|eight] [checkpoint.bin] [out-dir]

use std::path::PathBuf;
use std::str::FromStr;

use quadlab::sim::{trot_action, RewardWeights, SimConfig};
use quadlab::sweep::default_courses;
use quadlab::validation::{
    emit_report, run_validation, validate_checkpoint, CourseKind, Policy, ValidationConfig, ValidationError,
};
use quadlab::{ObsConfig, RunCheckpoint, Sim, SimNoise};

/// Open-loop trot whose turn command is proportional to the yaw error.
struct SteeringTrot {
    phase: f64,
}

impl Policy for SteeringTrot {
    fn obs_dim(&self) -> usize {
        14
    }

    fn reset(&mut self) {}

    fn act(&mut self, obs: &[f64]) -> Result<Vec<f64>, ValidationError> {
        self.phase += 0.6;
        let turn = (1.5 * obs[3]).clamp(-0.8, 0.8);
        Ok(trot_action(self.phase, 0.5, 0.8, turn).to_vec())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind = CourseKind::from_str(args.next().as_deref().unwrap_or("eight"))?;
    let checkpoint = args.next().filter(|a| a != "-").map(PathBuf::from);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "validation_out".into()));

    let course = default_courses().into_iter().find(|c| c.name == kind.name()).expect("default course");
    let cfg = ValidationConfig::default();
    let (report, label, platform) = match &checkpoint {
        Some(path) => {
            let ck = RunCheckpoint::load(path)?;
            let platform = (ck.config.train.platform_width, ck.config.train.platform_height);
            (validate_checkpoint(&ck, &course, &cfg)?, "checkpoint", platform)
        }
        None => {
            let mut sim = Sim::new(SimConfig::default(), ObsConfig::default(), RewardWeights::default(), SimNoise::off())?;
            let report = run_validation(&mut SteeringTrot { phase: 0.0 }, &mut sim, &course, &cfg)?;
            (report, "scripted", (3.5, 2.5))
        }
    };

    println!(
        "{}: {}/{} waypoints, completed {}, {} stalls, mean cross-track {:.3} m, {:.1} s",
        course.name,
        report.waypoints_reached,
        report.total_waypoints,
        report.completed,
        report.interventions.len(),
        report.mean_cross_track,
        report.sim_time
    );
    let (csv, svg) = emit_report(&report, &out, label, platform)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
