//! Drives the simulator with an open-loop trot, straight and then turning.
//!
//! cargo run --release --example scripted_gait -- [turn]

use quadlab::sim::{trot_action, RewardWeights, SimConfig};
use quadlab::{ObsConfig, Pose, Sim, SimNoise};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let turn: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.3);
    let mut sim = Sim::new(SimConfig::default(), ObsConfig::default(), RewardWeights::default(), SimNoise::off())?;
    sim.place(Pose::default());
    sim.set_heading(0.0);

    let mut ret = 0.0;
    for k in 0..400 {
        let steer = if k < 200 { 0.0 } else { turn };
        let r = sim.step(&trot_action(k as f64 * 0.6, 0.5, 0.8, steer))?;
        ret += r.reward;
        if k % 50 == 49 {
            let p = sim.pose();
            println!(
                "step {:>3}  t {:>5.2} s  x {:>6.3}  y {:>6.3}  yaw {:>6.3}  roll {:>6.3}  return {:>7.3}",
                k + 1,
                sim.state().sim_time,
                p.x,
                p.y,
                p.yaw,
                r.roll,
                ret
            );
        }
    }
    println!("{} servo clamp events", sim.clamp_events());
    Ok(())
}
