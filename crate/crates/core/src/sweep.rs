//! Strategy × seed sweeps: train each run, keep its best checkpoint, and
//! validate it on the waypoint courses.

use std::fmt::Write as _;
use std::path::Path;

use log::info;

use crate::config::{RunConfig, StrategyKind};
use crate::trainer::{train_in_process, RunCheckpoint, RunMetrics, TrainError};
use crate::validation::{
    build_trajectory, emit_report, validate_checkpoint, CourseKind, Trajectory, ValidationConfig, ValidationError,
    ValidationReport,
};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("run {strategy} seed {seed} produced no evaluation checkpoint")]
    NoCheckpoint { strategy: &'static str, seed: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The three validation courses with their default sizes.
pub fn default_courses() -> Vec<Trajectory> {
    [
        (CourseKind::Line, 2.0, 0),
        (CourseKind::Circle, 1.0, 12),
        (CourseKind::Eight, 0.75, 8),
    ]
    .into_iter()
    .map(|(k, s, n)| build_trajectory(k, s, n).expect("default courses are valid"))
    .collect()
}

pub fn strategy_name(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::ToYaw => "to_yaw",
        StrategyKind::UniformEps => "uniform_eps",
        StrategyKind::NormalEps => "normal_eps",
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub best_score: f64,
    pub best_episode: u64,
    pub best: RunCheckpoint,
    pub metrics: RunMetrics,
    pub reports: Vec<ValidationReport>,
}

impl SweepRun {
    pub fn report(&self, course: &str) -> Option<&ValidationReport> {
        self.reports.iter().find(|r| r.trajectory.name == course)
    }
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub base: RunConfig,
    pub strategies: Vec<StrategyKind>,
    pub seeds: Vec<u64>,
    pub courses: Vec<Trajectory>,
    pub validation: ValidationConfig,
}

impl SweepPlan {
    pub fn new(base: RunConfig, strategies: Vec<StrategyKind>, seeds: Vec<u64>) -> Self {
        Self {
            base,
            strategies,
            seeds,
            courses: default_courses(),
            validation: ValidationConfig::default(),
        }
    }
}

/// Trains and validates one run.
pub fn sweep_one(plan: &SweepPlan, kind: StrategyKind, seed: u64, out: Option<&Path>) -> Result<SweepRun, SweepError> {
    let name = strategy_name(kind);
    let mut cfg = plan.base.clone();
    cfg.strategy.set_kind(kind);
    cfg.train.seed = seed;
    let run_dir = out.map(|o| o.join(format!("{name}_seed{seed}")));
    let trained = train_in_process(&cfg, run_dir.as_deref())?;
    let best = trained.best.ok_or(SweepError::NoCheckpoint { strategy: name, seed })?;
    let idx = trained.best_index.expect("best checkpoint implies an index");
    let best_score = trained.metrics.evals[idx].score;
    info!("{name} seed {seed}: best eval {best_score:.3} after episode {}", best.episode);

    let mut reports = Vec::with_capacity(plan.courses.len());
    for course in &plan.courses {
        let report = validate_checkpoint(&best, course, &plan.validation)?;
        if let Some(dir) = &run_dir {
            let platform = (cfg.train.platform_width, cfg.train.platform_height);
            emit_report(&report, &dir.join("validation"), "best", platform)?;
        }
        reports.push(report);
    }
    Ok(SweepRun {
        strategy: kind,
        seed,
        best_score,
        best_episode: best.episode,
        best,
        metrics: trained.metrics,
        reports,
    })
}

/// Runs every strategy for every seed, sequentially.
pub fn run_sweep(plan: &SweepPlan, out: Option<&Path>) -> Result<Vec<SweepRun>, SweepError> {
    let mut runs = Vec::new();
    for &kind in &plan.strategies {
        for &seed in &plan.seeds {
            runs.push(sweep_one(plan, kind, seed, out)?);
        }
    }
    if let Some(dir) = out {
        std::fs::write(dir.join("sweep_summary.csv"), summary_csv(&runs))?;
    }
    Ok(runs)
}

pub fn summary_csv(runs: &[SweepRun]) -> String {
    let mut s = String::from(
        "strategy,seed,best_score,best_episode,course,completed,waypoints_reached,total_waypoints,interventions,mean_cross_track\n",
    );
    for run in runs {
        for r in &run.reports {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                strategy_name(run.strategy),
                run.seed,
                run.best_score,
                run.best_episode,
                r.trajectory.name,
                r.completed,
                r.waypoints_reached,
                r.total_waypoints,
                r.interventions.len(),
                r.mean_cross_track
            );
        }
    }
    s
}
