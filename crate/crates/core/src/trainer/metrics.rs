use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub episode: usize,
    pub steps: usize,
    pub ret: f64,
    pub discounted: f64,
    pub interventions: usize,
    /// Mean non-exploration score when an evaluation ran after this episode.
    pub eval_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    /// Number of training episodes completed when the evaluation ran.
    pub episode: usize,
    pub score: f64,
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub seed: u64,
    pub config_hash: String,
    pub rows: Vec<EpisodeRow>,
    pub step_rewards: Vec<f64>,
    pub evals: Vec<EvalRecord>,
    pub interventions: usize,
    pub training_steps: usize,
    pub early_terminations: usize,
    /// Steps not taken because episodes ended early.
    pub shortfall: usize,
    pub wall_clock_secs: f64,
}

impl RunMetrics {
    pub const CSV_HEADER: &'static str = "episode,steps,return,discounted_return,interventions,eval_score";

    /// One row per episode. Wall-clock time is deliberately absent so equal
    /// seeds give byte-identical files.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let eval = r.eval_score.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.episode, r.steps, r.ret, r.discounted, r.interventions, eval
            );
        }
        s
    }

    /// Same content as `self` ignoring wall-clock time and checkpoint paths.
    pub fn same_content(&self, other: &RunMetrics) -> bool {
        let strip = |m: &RunMetrics| {
            let mut m = m.clone();
            m.wall_clock_secs = 0.0;
            for e in &mut m.evals {
                e.checkpoint = None;
            }
            m
        };
        strip(self) == strip(other)
    }

    pub fn mean_return_last(&self, n: usize) -> f64 {
        let tail = &self.rows[self.rows.len().saturating_sub(n)..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().map(|r| r.ret).sum::<f64>() / tail.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let m = RunMetrics {
            rows: vec![
                EpisodeRow {
                    episode: 0,
                    steps: 200,
                    ret: 1.5,
                    discounted: 1.25,
                    interventions: 0,
                    eval_score: None,
                },
                EpisodeRow {
                    episode: 1,
                    steps: 17,
                    ret: -0.5,
                    discounted: -0.25,
                    interventions: 1,
                    eval_score: Some(3.0),
                },
            ],
            ..RunMetrics::default()
        };
        assert_eq!(
            m.to_csv(),
            "episode,steps,return,discounted_return,interventions,eval_score\n0,200,1.5,1.25,0,\n1,17,-0.5,-0.25,1,3\n"
        );
    }
}
