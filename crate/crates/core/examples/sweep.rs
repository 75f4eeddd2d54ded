//! Trains every reset strategy on a few seeds and validates each best
//! checkpoint on the line, circle and figure-eight courses.
//!
//! cargo run --release --example sweep -- [seeds] [episodes] [out-dir]

use std::path::PathBuf;

use quadlab::config::{RunConfig, StrategyKind};
use quadlab::sweep::{run_sweep, strategy_name, summary_csv, SweepPlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let episodes: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(150);
    let out = args.next().map(PathBuf::from);

    let mut base = RunConfig::desk();
    base.train.episodes = episodes;
    let plan = SweepPlan::new(
        base,
        vec![StrategyKind::ToYaw, StrategyKind::UniformEps, StrategyKind::NormalEps],
        (0..seeds).collect(),
    );
    let runs = run_sweep(&plan, out.as_deref())?;
    for run in &runs {
        let cells: Vec<String> = run
            .reports
            .iter()
            .map(|r| format!("{} {}/{}", r.trajectory.name, r.waypoints_reached, r.total_waypoints))
            .collect();
        println!("{:<11} seed {}  best {:>7.3}  {}", strategy_name(run.strategy), run.seed, run.best_score, cells.join("  "));
    }
    print!("{}", summary_csv(&runs));
    Ok(())
}
