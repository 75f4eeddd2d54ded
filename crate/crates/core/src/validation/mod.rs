//! Waypoint-course evaluation of trained policies.

mod report;
mod run;
mod trajectory;

pub use report::{emit_report, render_svg, trace_csv, SUMMARY_FILE, SUMMARY_HEADER};
pub use run::{
    run_validation, Intervention, Plant, PointPlant, Policy, TracePoint, TrainedPolicy, validate_checkpoint, ValidationConfig,
    ValidationReport, ZeroPolicy,
};
pub use trajectory::{build_trajectory, heading_controller, CourseKind, HeadingCommand, Trajectory};

use thiserror::Error;

use crate::nn::NnError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("invalid trajectory: {0}")]
    Trajectory(String),
    #[error("unknown course kind {0:?}")]
    UnknownCourse(String),
    #[error("policy expects {policy} observations, plant produces {plant}")]
    ObsArity { policy: usize, plant: usize },
    #[error("cannot emit a report for an empty trace")]
    EmptyTrace,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
