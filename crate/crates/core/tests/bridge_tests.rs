use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

use proptest::prelude::*;
use quadlab::bridge::{decode_message, encode_message, serve_env, BridgeError, EnvServer, Message, RemoteEnv, SessionEnd, Topic};
use quadlab::config::RunConfig;
use quadlab::rng::{seeded, stream, Stream};
use quadlab::sim::trot_action;
use quadlab::trainer::{run_episode, train, training_env, Environment, Learner, TrainError};
use rand::Rng;

fn finite(rng: &mut impl Rng) -> f64 {
    loop {
        let v = f64::from_bits(rng.gen());
        if v.is_finite() {
            return v;
        }
    }
}

#[test]
fn random_messages_round_trip() {
    let mut rng = seeded(41);
    for i in 0..10_000 {
        let topic = Topic::ALL[i % 4];
        let n = match topic {
            Topic::Action => 8,
            Topic::Reset => 1,
            Topic::Obs => 8 + rng.gen_range(0..20),
            Topic::Ack => 4 + rng.gen_range(0..20),
        };
        let payload = (0..n)
            .map(|_| if rng.gen_bool(0.5) { finite(&mut rng) } else { rng.gen_range(-10.0..10.0) })
            .collect();
        let m = Message {
            topic,
            seq: rng.gen(),
            t: rng.gen(),
            payload,
        };
        let back = decode_message(encode_message(&m).as_bytes()).unwrap();
        assert_eq!(back.topic, m.topic);
        assert_eq!((back.seq, back.t), (m.seq, m.t));
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.payload), bits(&m.payload));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn decode_is_total(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        match decode_message(&bytes) {
            Ok(m) => prop_assert!(m.topic.accepts_arity(m.payload.len())),
            Err(BridgeError::Decode { offset, .. }) => prop_assert!(offset <= bytes.len()),
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }
}

fn desk(seed: u64) -> RunConfig {
    let mut cfg = RunConfig::desk();
    cfg.train.seed = seed;
    cfg
}

/// Serves `sessions` sessions of the run's training simulator on a free port.
fn spawn_server(cfg: &RunConfig, sessions: usize) -> (String, thread::JoinHandle<Vec<SessionEnd>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let env = training_env(cfg).unwrap();
    let handle = thread::spawn(move || {
        let mut server = EnvServer::new(env);
        serve_env(&mut server, &listener, Some(sessions)).unwrap()
    });
    (addr, handle)
}

#[test]
fn request_reply_pairing() {
    let cfg = desk(0);
    let (addr, server) = spawn_server(&cfg, 1);
    let mut client = RemoteEnv::connect(&addr, 14, Duration::from_secs(5)).unwrap();
    let ack = client.request(Topic::Reset, vec![0.5]).unwrap();
    assert_eq!(ack.topic, Topic::Ack);
    assert_eq!(ack.seq, 2);
    assert_eq!(ack.payload[0], 0.5);
    let obs = client.request(Topic::Action, vec![0.0; 8]).unwrap();
    assert_eq!((obs.topic, obs.seq), (Topic::Obs, 4));
    // dt reported in the observation is the control period
    assert_eq!(obs.payload[1], 0.05);
    assert_eq!(obs.payload[8], 0.05);
    drop(client);
    assert_eq!(server.join().unwrap(), vec![SessionEnd::Closed { requests: 2 }]);
}

#[test]
fn malformed_line_keeps_session_alive_and_stale_seq_resets_it() {
    let cfg = desk(0);
    let (addr, server) = spawn_server(&cfg, 1);
    let stream = TcpStream::connect(&addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
    let mut w = stream.try_clone().unwrap();
    let mut r = BufReader::new(stream);
    w.write_all(b"quad/action 1 0 0.1 0.2\n").unwrap();
    w.write_all(b"quad/reset 3 0 0.25\n").unwrap();
    let mut line = String::new();
    r.read_line(&mut line).unwrap();
    let ack = decode_message(line.as_bytes()).unwrap();
    assert_eq!((ack.topic, ack.seq), (Topic::Ack, 4));
    w.write_all(b"quad/reset 2 0 0.25\n").unwrap();
    line.clear();
    assert_eq!(r.read_line(&mut line).unwrap(), 0);
    assert_eq!(
        server.join().unwrap(),
        vec![SessionEnd::Reset {
            expected_above: 3,
            got: 2
        }]
    );
}

#[test]
fn wire_episode_matches_in_process_bit_for_bit() {
    let cfg = desk(3);
    let strategy = cfg.strategy.strategy();

    let mut local_env = training_env(&cfg).unwrap();
    let mut local = Learner::new(&cfg, 14).unwrap();
    let mut rng = stream(3, Stream::Reset);
    let a = run_episode(&mut local, &mut local_env, &strategy, &mut rng, 200, true).unwrap();

    let (addr, server) = spawn_server(&cfg, 1);
    let mut remote_env = RemoteEnv::connect(&addr, 14, Duration::from_secs(5)).unwrap();
    let mut remote = Learner::new(&cfg, 14).unwrap();
    let mut rng = stream(3, Stream::Reset);
    let b = run_episode(&mut remote, &mut remote_env, &strategy, &mut rng, 200, true).unwrap();
    drop(remote_env);
    server.join().unwrap();

    assert_eq!(a.steps, 200);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.rewards), bits(&b.rewards));
    assert_eq!(local.agent, remote.agent);
}

#[test]
fn wire_training_matches_in_process_metrics() {
    let mut cfg = desk(4);
    cfg.train.episodes = 8;
    cfg.train.steps_per_episode = 60;
    cfg.train.eval_every = 4;
    cfg.agent.warmup_steps = 100;
    let local = train(&cfg, &mut training_env(&cfg).unwrap(), None).unwrap();
    let (addr, server) = spawn_server(&cfg, 1);
    let mut remote_env = RemoteEnv::connect(&addr, 14, Duration::from_secs(5)).unwrap();
    let remote = train(&cfg, &mut remote_env, None).unwrap();
    drop(remote_env);
    server.join().unwrap();
    assert!(local.metrics.same_content(&remote.metrics));
    assert_eq!(local.metrics.to_csv(), remote.metrics.to_csv());
}

#[test]
fn ten_thousand_steps_without_sequence_gaps() {
    let cfg = desk(0);
    let (addr, server) = spawn_server(&cfg, 1);
    let mut env = RemoteEnv::connect(&addr, 14, Duration::from_secs(5)).unwrap();
    env.reset_heading(0.0).unwrap();
    for k in 0..10_000 {
        env.step(&trot_action(k as f64 * 0.6, 0.5, 0.8, 0.0)).unwrap();
    }
    assert_eq!(env.next_seq(), 1 + 2 * 10_001);
    drop(env);
    assert_eq!(server.join().unwrap(), vec![SessionEnd::Closed { requests: 10_001 }]);
}

/// Accepts one connection, answers `replies` requests with the real
/// simulator, then drops the socket.
fn flaky_server(cfg: &RunConfig, replies: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let mut env = training_env(cfg).unwrap();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut w = stream.try_clone().unwrap();
        let mut r = BufReader::new(stream);
        let mut line = String::new();
        for _ in 0..replies {
            line.clear();
            r.read_line(&mut line).unwrap();
            let m = decode_message(line.as_bytes()).unwrap();
            let reply = match m.topic {
                Topic::Reset => {
                    let o = env.reset_heading(m.payload[0]).unwrap();
                    let mut p = vec![o.theta, o.pose.x, o.pose.y, o.pose.yaw];
                    p.extend(o.obs);
                    Message { topic: Topic::Ack, seq: m.seq + 1, t: 0, payload: p }
                }
                _ => {
                    let s = env.step(&m.payload).unwrap();
                    let mut p = vec![s.reward, s.dt, f64::from(u8::from(s.intervened)), s.pose.x, s.pose.y, s.pose.yaw, s.heading, s.sim_time];
                    p.extend(s.obs);
                    Message { topic: Topic::Obs, seq: m.seq + 1, t: 0, payload: p }
                }
            };
            w.write_all(encode_message(&reply).as_bytes()).unwrap();
        }
    });
    addr
}

#[test]
fn server_loss_checkpoints_and_halts() {
    let mut cfg = desk(5);
    cfg.train.episodes = 4;
    cfg.train.steps_per_episode = 50;
    let addr = flaky_server(&cfg, 80);
    let mut env = RemoteEnv::connect(&addr, 14, Duration::from_secs(5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = train(&cfg, &mut env, Some(dir.path())).err().expect("connection drops");
    assert!(matches!(err, TrainError::Transport(BridgeError::ConnectionLost(_))), "{err:?}");
    assert!(dir.path().join("checkpoints/interrupted.bin").exists());
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.lines().count() >= 2);
    assert!(metrics.lines().count() < 1 + cfg.train.episodes);
}

#[test]
fn silent_server_times_out() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hold = thread::spawn(move || {
        let (s, _) = listener.accept().unwrap();
        thread::sleep(Duration::from_millis(500));
        drop(s);
    });
    let mut env = RemoteEnv::connect(addr, 14, Duration::from_millis(100)).unwrap();
    match env.request(Topic::Reset, vec![0.0]) {
        Err(BridgeError::Timeout(100)) => {}
        other => panic!("{other:?}"),
    }
    hold.join().unwrap();
}

#[test]
fn garbage_reply_is_a_decode_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let t = thread::spawn(move || {
        let (s, _) = listener.accept().unwrap();
        let mut w = s.try_clone().unwrap();
        let mut line = String::new();
        BufReader::new(s).read_line(&mut line).unwrap();
        w.write_all(b"quad/ack 2 0 nope\n").unwrap();
    });
    let mut env = RemoteEnv::connect(addr, 14, Duration::from_secs(5)).unwrap();
    assert!(matches!(
        env.request(Topic::Reset, vec![0.0]),
        Err(BridgeError::Decode { offset: 13, .. })
    ));
    t.join().unwrap();
}
