//! Serves the simulator over TCP and trains one episode against it through
//! the line protocol, printing the first few exchanged lines.
//!
//! cargo run --release --example wire_bridge

use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use quadlab::bridge::{encode_message, serve_env, EnvServer, RemoteEnv, Topic};
use quadlab::config::RunConfig;
use quadlab::rng::{stream, Stream};
use quadlab::trainer::{run_episode, training_env, Environment, Learner};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::desk();
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let env = training_env(&cfg)?;
    let server = thread::spawn(move || serve_env(&mut EnvServer::new(env), &listener, Some(1)));

    let mut remote = RemoteEnv::connect(addr, 14, Duration::from_secs(5))?;
    println!("sending reset with offset 0.25 as seq {}", remote.next_seq());
    let reset = remote.request(Topic::Reset, vec![0.25])?;
    println!("< {}", encode_message(&reset).trim_end());
    let step = remote.step(&[0.0; 8])?;
    println!("one zero-action step: reward {:.5}, dt {:.3}, pose {:?}", step.reward, step.dt, step.pose);

    let mut learner = Learner::new(&cfg, 14)?;
    let strategy = cfg.strategy.strategy();
    let ep = run_episode(&mut learner, &mut remote, &strategy, &mut stream(cfg.train.seed, Stream::Reset), 200, true)?;
    println!(
        "remote episode: {} steps, return {:.3}, next request seq {}",
        ep.steps,
        ep.rewards.iter().sum::<f64>(),
        remote.next_seq()
    );
    drop(remote);
    for end in server.join().expect("server thread")? {
        println!("server: {end:?}");
    }
    Ok(())
}
