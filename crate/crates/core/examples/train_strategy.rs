//! Trains one desk-scale run and prints the learning curve.
//!
//! cargo run --release --example train_strategy -- [to_yaw|uniform_eps|normal_eps] [seed] [episodes]

use quadlab::config::{RunConfig, StrategyKind};
use quadlab::trainer::train_in_process;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let kind = match args.next().as_deref() {
        Some("to_yaw") => StrategyKind::ToYaw,
        Some("uniform_eps") => StrategyKind::UniformEps,
        _ => StrategyKind::NormalEps,
    };
    let mut cfg = RunConfig::desk();
    cfg.strategy.set_kind(kind);
    if let Some(seed) = args.next() {
        cfg.train.seed = seed.parse()?;
    }
    if let Some(n) = args.next() {
        cfg.train.episodes = n.parse()?;
    }

    let out = train_in_process(&cfg, None)?;
    let m = &out.metrics;
    for chunk in m.rows.chunks(10) {
        let mean = chunk.iter().map(|r| r.ret).sum::<f64>() / chunk.len() as f64;
        let eval = chunk.last().and_then(|r| r.eval_score);
        println!(
            "episodes {:>4}-{:<4} mean return {:>8.3}  eval {}",
            chunk[0].episode,
            chunk[chunk.len() - 1].episode,
            mean,
            eval.map(|e| format!("{e:.3}")).unwrap_or_default()
        );
    }
    println!(
        "{} steps, {} interventions, {:.1} s",
        m.training_steps, m.interventions, m.wall_clock_secs
    );
    if let Some(i) = out.best_index {
        println!("best evaluation: {} after episode {}", m.evals[i].score, m.evals[i].episode);
    }
    Ok(())
}
