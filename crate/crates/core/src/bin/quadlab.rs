use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use quadlab::bridge::{serve_env, EnvServer};
use quadlab::config::{RunConfig, StrategyKind};
use quadlab::sweep::{default_courses, run_sweep, strategy_name, SweepPlan};
use quadlab::trainer::{train_in_process, training_env, RunCheckpoint};
use quadlab::validation::{emit_report, validate_checkpoint, CourseKind, ValidationConfig};

#[derive(Parser)]
#[command(name = "quadlab", version, about = "Directional locomotion training on a quadruped surrogate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "runs/train")]
        out: PathBuf,
    },
    /// Validate a checkpoint on a waypoint course.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        /// line, circle or eight
        #[arg(long, default_value = "eight")]
        trajectory: String,
        #[arg(long, default_value = "runs/validation")]
        out: PathBuf,
        #[arg(long, default_value_t = 180.0)]
        max_time: f64,
    },
    /// Train every strategy for several seeds and validate the best checkpoints.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "yaw,uniform,normal")]
        strategies: Vec<String>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value = "runs/sweep")]
        out: PathBuf,
    },
    /// Serve the simulator over the wire protocol.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
}

fn load(config: Option<PathBuf>) -> Result<RunConfig, Box<dyn std::error::Error>> {
    Ok(match config {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::desk(),
    })
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    match s {
        "yaw" | "to_yaw" => Ok(StrategyKind::ToYaw),
        "uniform" | "uniform_eps" => Ok(StrategyKind::UniformEps),
        "normal" | "normal_eps" => Ok(StrategyKind::NormalEps),
        other => Err(format!("unknown strategy {other:?}")),
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Train { config, seed, out } => {
            let mut cfg = load(config)?;
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            let res = train_in_process(&cfg, Some(&out))?;
            let m = &res.metrics;
            println!(
                "trained {} episodes ({} steps, {} interventions) in {:.1} s",
                m.rows.len(),
                m.training_steps,
                m.interventions,
                m.wall_clock_secs
            );
            if let Some(i) = res.best_index {
                println!("best evaluation {:.4} after episode {}", m.evals[i].score, m.evals[i].episode);
                println!("best checkpoint: {}", out.join("best.bin").display());
            }
        }
        Command::Evaluate {
            checkpoint,
            trajectory,
            out,
            max_time,
        } => {
            let ck = RunCheckpoint::load(&checkpoint)?;
            let kind = CourseKind::from_str(&trajectory)?;
            let course = default_courses()
                .into_iter()
                .find(|c| c.name == kind.name())
                .expect("every course kind has a default");
            let vcfg = ValidationConfig {
                max_time,
                ..ValidationConfig::default()
            };
            let report = validate_checkpoint(&ck, &course, &vcfg)?;
            let label = checkpoint
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "checkpoint".into());
            let platform = (ck.config.train.platform_width, ck.config.train.platform_height);
            let (csv, svg) = emit_report(&report, &out, &label, platform)?;
            println!(
                "{}: reached {}/{} waypoints, completed {}, {} interventions, mean cross-track {:.3} m, {:.1} s",
                course.name,
                report.waypoints_reached,
                report.total_waypoints,
                report.completed,
                report.interventions.len(),
                report.mean_cross_track,
                report.sim_time
            );
            println!("wrote {} and {}", csv.display(), svg.display());
        }
        Command::Sweep {
            config,
            strategies,
            seeds,
            out,
        } => {
            let base = load(config)?;
            let kinds = strategies
                .iter()
                .map(|s| parse_strategy(s))
                .collect::<Result<Vec<_>, _>>()?;
            let seeds = (0..seeds).map(|k| base.train.seed + k).collect();
            std::fs::create_dir_all(&out)?;
            let runs = run_sweep(&SweepPlan::new(base, kinds, seeds), Some(&out))?;
            for r in &runs {
                let cells: Vec<String> = r
                    .reports
                    .iter()
                    .map(|v| format!("{} {}/{}", v.trajectory.name, v.waypoints_reached, v.total_waypoints))
                    .collect();
                println!(
                    "{:<12} seed {:<3} best {:>8.3}  {}",
                    strategy_name(r.strategy),
                    r.seed,
                    r.best_score,
                    cells.join("  ")
                );
            }
            println!("summary: {}", out.join("sweep_summary.csv").display());
        }
        Command::Serve { config, listen } => {
            let cfg = load(config)?;
            let listener = TcpListener::bind(&listen)?;
            println!("serving simulator on {}", listener.local_addr()?);
            let mut server = EnvServer::new(training_env(&cfg)?);
            serve_env(&mut server, &listener, None)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
