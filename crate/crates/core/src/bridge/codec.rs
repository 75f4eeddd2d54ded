use std::fmt::Write as _;

use super::BridgeError;
use crate::sim::NUM_SERVOS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topic {
    Obs,
    Action,
    Reset,
    Ack,
}

/// Leading `quad/obs` fields before the observation vector:
/// reward, dt, intervened, x, y, yaw, heading, sim_time.
pub const OBS_HEADER: usize = 8;
/// Leading `quad/ack` fields before the observation vector: θ, x, y, yaw.
pub const ACK_HEADER: usize = 4;

impl Topic {
    pub const ALL: [Topic; 4] = [Topic::Obs, Topic::Action, Topic::Reset, Topic::Ack];

    pub fn as_str(self) -> &'static str {
        match self {
            Topic::Obs => "quad/obs",
            Topic::Action => "quad/action",
            Topic::Reset => "quad/reset",
            Topic::Ack => "quad/ack",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Whether `n` payload values fit this topic.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            Topic::Action => n == NUM_SERVOS,
            Topic::Reset => n == 1,
            Topic::Obs => n >= OBS_HEADER,
            Topic::Ack => n >= ACK_HEADER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub topic: Topic,
    pub seq: u64,
    /// Sender clock in milliseconds.
    pub t: u64,
    pub payload: Vec<f64>,
}

/// One newline-terminated line. Floats use the shortest decimal that parses
/// back to the same bits.
pub fn encode_message(m: &Message) -> String {
    let mut s = String::with_capacity(32 + 24 * m.payload.len());
    let _ = write!(s, "{} {} {}", m.topic.as_str(), m.seq, m.t);
    for v in &m.payload {
        let _ = write!(s, " {v:?}");
    }
    s.push('\n');
    s
}

fn err(offset: usize, reason: impl Into<String>) -> BridgeError {
    BridgeError::Decode {
        offset,
        reason: reason.into(),
    }
}

/// Parses one line; a single trailing `\n` (or `\r\n`) is allowed.
pub fn decode_message(bytes: &[u8]) -> Result<Message, BridgeError> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let body = body.strip_suffix(b"\r").unwrap_or(body);
    let text = std::str::from_utf8(body).map_err(|e| err(e.valid_up_to(), "invalid UTF-8"))?;
    if let Some(pos) = text.find(['\n', '\r']) {
        return Err(err(pos, "embedded line break"));
    }

    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c == ' ', start) {
            (true, Some(s)) => {
                tokens.push((s, &text[s..i]));
                start = None;
            }
            (true, None) => return Err(err(i, "unexpected space")),
            (false, None) => start = Some(i),
            (false, Some(_)) => {}
        }
    }
    match start {
        Some(s) => tokens.push((s, &text[s..])),
        None if !text.is_empty() => return Err(err(text.len(), "trailing space")),
        None => {}
    }

    let mut it = tokens.into_iter();
    let (off, topic) = it.next().ok_or_else(|| err(0, "empty message"))?;
    let topic = Topic::parse(topic).ok_or_else(|| err(off, format!("unknown topic {topic:?}")))?;
    let (off, seq) = it.next().ok_or_else(|| err(text.len(), "missing sequence number"))?;
    let seq = seq.parse().map_err(|_| err(off, "bad sequence number"))?;
    let (off, t) = it.next().ok_or_else(|| err(text.len(), "missing timestamp"))?;
    let t = t.parse().map_err(|_| err(off, "bad timestamp"))?;
    let payload = it
        .map(|(off, tok)| tok.parse::<f64>().map_err(|_| err(off, format!("bad number {tok:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if !topic.accepts_arity(payload.len()) {
        return Err(err(
            text.len(),
            format!("{} does not take {} payload values", topic.as_str(), payload.len()),
        ));
    }
    Ok(Message { topic, seq, t, payload })
}
