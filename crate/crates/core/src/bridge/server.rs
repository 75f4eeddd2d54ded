use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};

use log::{info, warn};

use super::{decode_message, encode_message, BridgeError, Message, Topic};
use crate::trainer::Environment;

/// How a session finished.
#[derive(Debug, Clone, PartialEq)]
pub enum SessionEnd {
    /// The trainer closed the connection.
    Closed { requests: u64 },
    /// A request arrived with a sequence number that did not increase.
    Reset { expected_above: u64, got: u64 },
    /// The environment failed; the connection was dropped.
    Failed(String),
}

/// Robot side of the bridge: answers trainer requests with an environment.
#[derive(Debug)]
pub struct EnvServer<E> {
    pub env: E,
    clock_ms: u64,
}

impl<E: Environment> EnvServer<E> {
    pub fn new(env: E) -> Self {
        Self { env, clock_ms: 0 }
    }

    /// Serves one connection until it closes or must be reset. Malformed
    /// lines are logged and skipped.
    pub fn serve_session(&mut self, stream: TcpStream) -> Result<SessionEnd, BridgeError> {
        stream.set_nodelay(true)?;
        let mut writer = stream.try_clone()?;
        let mut reader = BufReader::new(stream);
        let mut line = Vec::with_capacity(512);
        let mut last_seq: Option<u64> = None;
        let mut requests = 0u64;
        loop {
            line.clear();
            if reader.read_until(b'\n', &mut line)? == 0 {
                return Ok(SessionEnd::Closed { requests });
            }
            let msg = match decode_message(&line) {
                Ok(m) => m,
                Err(e) => {
                    warn!("dropping malformed request: {e}");
                    continue;
                }
            };
            if let Some(last) = last_seq {
                if msg.seq <= last {
                    warn!("sequence went from {last} to {}; resetting session", msg.seq);
                    return Ok(SessionEnd::Reset {
                        expected_above: last,
                        got: msg.seq,
                    });
                }
            }
            last_seq = Some(msg.seq);
            let reply = match self.handle(&msg) {
                Ok(Some(r)) => r,
                Ok(None) => {
                    warn!("ignoring {} from trainer", msg.topic.as_str());
                    continue;
                }
                Err(e) => {
                    warn!("environment failed: {e}");
                    return Ok(SessionEnd::Failed(e.to_string()));
                }
            };
            requests += 1;
            writer.write_all(encode_message(&reply).as_bytes())?;
        }
    }

    fn handle(&mut self, msg: &Message) -> Result<Option<Message>, crate::trainer::TrainError> {
        let seq = msg.seq + 1;
        match msg.topic {
            Topic::Reset => {
                let r = self.env.reset_heading(msg.payload[0])?;
                let mut payload = vec![r.theta, r.pose.x, r.pose.y, r.pose.yaw];
                payload.extend_from_slice(&r.obs);
                Ok(Some(Message {
                    topic: Topic::Ack,
                    seq,
                    t: self.clock_ms,
                    payload,
                }))
            }
            Topic::Action => {
                let s = self.env.step(&msg.payload)?;
                self.clock_ms = (s.sim_time * 1000.0).round() as u64;
                let mut payload = vec![
                    s.reward,
                    s.dt,
                    f64::from(u8::from(s.intervened)),
                    s.pose.x,
                    s.pose.y,
                    s.pose.yaw,
                    s.heading,
                    s.sim_time,
                ];
                payload.extend_from_slice(&s.obs);
                Ok(Some(Message {
                    topic: Topic::Obs,
                    seq,
                    t: self.clock_ms,
                    payload,
                }))
            }
            Topic::Obs | Topic::Ack => Ok(None),
        }
    }
}

/// Accepts sessions on `listener` one at a time, serving each to completion.
/// Stops after `max_sessions` sessions when given.
pub fn serve_env<E: Environment>(
    server: &mut EnvServer<E>,
    listener: &TcpListener,
    max_sessions: Option<usize>,
) -> Result<Vec<SessionEnd>, BridgeError> {
    let mut ends = Vec::new();
    while max_sessions.map_or(true, |m| ends.len() < m) {
        let (stream, peer) = listener.accept()?;
        info!("trainer connected from {peer}");
        let end = server.serve_session(stream)?;
        info!("session with {peer} ended: {end:?}");
        ends.push(end);
    }
    Ok(ends)
}
