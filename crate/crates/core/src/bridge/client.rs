use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use super::{decode_message, encode_message, BridgeError, Message, Topic, ACK_HEADER, OBS_HEADER};
use crate::sim::{Pose, SimError, NUM_SERVOS};
use crate::trainer::{Environment, ResetOutcome, StepOutcome, TrainError};

/// Trainer side of the bridge. Each call is a blocking request/reply.
#[derive(Debug)]
pub struct RemoteEnv {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    obs_dim: usize,
    timeout: Duration,
    next_seq: u64,
    started: Instant,
    line: Vec<u8>,
}

impl RemoteEnv {
    pub fn connect<A: ToSocketAddrs>(addr: A, obs_dim: usize, timeout: Duration) -> Result<Self, BridgeError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(timeout))?;
        Ok(Self {
            writer: stream.try_clone()?,
            reader: BufReader::new(stream),
            obs_dim,
            timeout,
            next_seq: 1,
            started: Instant::now(),
            line: Vec::with_capacity(512),
        })
    }

    /// Sequence number the next request will carry.
    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    fn lost(e: std::io::Error) -> BridgeError {
        match e.kind() {
            ErrorKind::WouldBlock | ErrorKind::TimedOut => BridgeError::Io(e),
            _ => BridgeError::ConnectionLost(e.to_string()),
        }
    }

    /// Sends one request and waits for its reply.
    pub fn request(&mut self, topic: Topic, payload: Vec<f64>) -> Result<Message, BridgeError> {
        let seq = self.next_seq;
        let msg = Message {
            topic,
            seq,
            t: self.started.elapsed().as_millis() as u64,
            payload,
        };
        self.writer
            .write_all(encode_message(&msg).as_bytes())
            .map_err(Self::lost)?;
        self.line.clear();
        match self.reader.read_until(b'\n', &mut self.line) {
            Ok(0) => return Err(BridgeError::ConnectionLost("server closed the connection".into())),
            Ok(_) if !self.line.ends_with(b"\n") => {
                return Err(BridgeError::ConnectionLost("connection closed mid-message".into()))
            }
            Ok(_) => {}
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                return Err(BridgeError::Timeout(self.timeout.as_millis() as u64))
            }
            Err(e) => return Err(Self::lost(e)),
        }
        let reply = decode_message(&self.line)?;
        if reply.seq != seq + 1 {
            return Err(BridgeError::Sequence {
                expected: seq + 1,
                got: reply.seq,
            });
        }
        self.next_seq = reply.seq + 1;
        Ok(reply)
    }

    fn expect(&self, sent: Topic, want: Topic, reply: &Message, header: usize) -> Result<(), BridgeError> {
        if reply.topic != want {
            return Err(BridgeError::Unexpected {
                sent: sent.as_str(),
                got: reply.topic.as_str(),
            });
        }
        if reply.payload.len() != header + self.obs_dim {
            return Err(BridgeError::Decode {
                offset: 0,
                reason: format!(
                    "{} carries {} observation values, expected {}",
                    want.as_str(),
                    reply.payload.len() - header,
                    self.obs_dim
                ),
            });
        }
        Ok(())
    }
}

impl Environment for RemoteEnv {
    fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    fn reset_heading(&mut self, offset: f64) -> Result<ResetOutcome, TrainError> {
        let reply = self.request(Topic::Reset, vec![offset])?;
        self.expect(Topic::Reset, Topic::Ack, &reply, ACK_HEADER)?;
        let p = &reply.payload;
        Ok(ResetOutcome {
            theta: p[0],
            pose: Pose {
                x: p[1],
                y: p[2],
                yaw: p[3],
            },
            obs: p[ACK_HEADER..].to_vec(),
        })
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, TrainError> {
        if action.len() != NUM_SERVOS {
            return Err(SimError::Action {
                expected: NUM_SERVOS,
                got: action.to_vec(),
            }
            .into());
        }
        let reply = self.request(Topic::Action, action.to_vec())?;
        self.expect(Topic::Action, Topic::Obs, &reply, OBS_HEADER)?;
        let p = &reply.payload;
        Ok(StepOutcome {
            reward: p[0],
            dt: p[1],
            intervened: p[2] != 0.0,
            pose: Pose {
                x: p[3],
                y: p[4],
                yaw: p[5],
            },
            heading: p[6],
            sim_time: p[7],
            obs: p[OBS_HEADER..].to_vec(),
        })
    }
}
