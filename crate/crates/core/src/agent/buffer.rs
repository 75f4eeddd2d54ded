use rand::Rng;

use super::AgentError;

/// One encoded environment step: `(z, a, r, z′, done)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub z: Vec<f64>,
    pub a: Vec<f64>,
    pub r: f64,
    pub z_next: Vec<f64>,
    pub done: bool,
}

/// A sampled mini-batch, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub len: usize,
    pub state_dim: usize,
    pub action_dim: usize,
    pub z: Vec<f64>,
    pub a: Vec<f64>,
    pub r: Vec<f64>,
    pub z_next: Vec<f64>,
    pub done: Vec<f64>,
}

impl Batch {
    pub fn from_transitions(ts: &[Transition]) -> Result<Self, AgentError> {
        let first = ts
            .first()
            .ok_or_else(|| AgentError::InvalidTransition("empty batch".into()))?;
        let (sd, ad) = (first.z.len(), first.a.len());
        let mut b = Batch {
            len: ts.len(),
            state_dim: sd,
            action_dim: ad,
            z: Vec::with_capacity(ts.len() * sd),
            a: Vec::with_capacity(ts.len() * ad),
            r: Vec::with_capacity(ts.len()),
            z_next: Vec::with_capacity(ts.len() * sd),
            done: Vec::with_capacity(ts.len()),
        };
        for t in ts {
            validate(t, sd, ad)?;
            b.z.extend_from_slice(&t.z);
            b.a.extend_from_slice(&t.a);
            b.r.push(t.r);
            b.z_next.extend_from_slice(&t.z_next);
            b.done.push(if t.done { 1.0 } else { 0.0 });
        }
        Ok(b)
    }

    pub fn transition(&self, i: usize) -> Transition {
        let (sd, ad) = (self.state_dim, self.action_dim);
        Transition {
            z: self.z[i * sd..(i + 1) * sd].to_vec(),
            a: self.a[i * ad..(i + 1) * ad].to_vec(),
            r: self.r[i],
            z_next: self.z_next[i * sd..(i + 1) * sd].to_vec(),
            done: self.done[i] != 0.0,
        }
    }
}

fn validate(t: &Transition, state_dim: usize, action_dim: usize) -> Result<(), AgentError> {
    if t.z.len() != state_dim || t.z_next.len() != state_dim {
        return Err(AgentError::InvalidTransition(format!(
            "state lengths {} / {}, expected {state_dim}",
            t.z.len(),
            t.z_next.len()
        )));
    }
    if t.a.len() != action_dim {
        return Err(AgentError::InvalidTransition(format!(
            "action length {}, expected {action_dim}",
            t.a.len()
        )));
    }
    if let Some(a) = t.a.iter().find(|a| !(-1.0..=1.0).contains(*a)) {
        return Err(AgentError::InvalidTransition(format!("action component {a} outside [-1, 1]")));
    }
    Ok(())
}

/// Fixed-capacity ring of transitions stored in flat arrays.
///
/// Storage is reserved up front; once `size == capacity` each push
/// overwrites the oldest slot.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    state_dim: usize,
    action_dim: usize,
    z: Vec<f64>,
    a: Vec<f64>,
    r: Vec<f64>,
    z_next: Vec<f64>,
    done: Vec<f64>,
    write_index: usize,
    size: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, state_dim: usize, action_dim: usize) -> Result<Self, AgentError> {
        if capacity == 0 || state_dim == 0 || action_dim == 0 {
            return Err(AgentError::Config("buffer capacity and dimensions must be positive".into()));
        }
        Ok(Self {
            capacity,
            state_dim,
            action_dim,
            z: Vec::with_capacity(capacity * state_dim),
            a: Vec::with_capacity(capacity * action_dim),
            r: Vec::with_capacity(capacity),
            z_next: Vec::with_capacity(capacity * state_dim),
            done: Vec::with_capacity(capacity),
            write_index: 0,
            size: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    /// Address of the state storage; stable once the buffer is full.
    pub fn storage_ptr(&self) -> *const f64 {
        self.z.as_ptr()
    }

    pub fn push(&mut self, t: &Transition) -> Result<(), AgentError> {
        validate(t, self.state_dim, self.action_dim)?;
        let (sd, ad) = (self.state_dim, self.action_dim);
        let done = if t.done { 1.0 } else { 0.0 };
        if self.size < self.capacity {
            self.z.extend_from_slice(&t.z);
            self.a.extend_from_slice(&t.a);
            self.r.push(t.r);
            self.z_next.extend_from_slice(&t.z_next);
            self.done.push(done);
            self.size += 1;
        } else {
            let i = self.write_index;
            self.z[i * sd..(i + 1) * sd].copy_from_slice(&t.z);
            self.a[i * ad..(i + 1) * ad].copy_from_slice(&t.a);
            self.r[i] = t.r;
            self.z_next[i * sd..(i + 1) * sd].copy_from_slice(&t.z_next);
            self.done[i] = done;
        }
        self.write_index = (self.write_index + 1) % self.capacity;
        Ok(())
    }

    fn slot(&self, i: usize) -> Transition {
        let (sd, ad) = (self.state_dim, self.action_dim);
        Transition {
            z: self.z[i * sd..(i + 1) * sd].to_vec(),
            a: self.a[i * ad..(i + 1) * ad].to_vec(),
            r: self.r[i],
            z_next: self.z_next[i * sd..(i + 1) * sd].to_vec(),
            done: self.done[i] != 0.0,
        }
    }

    /// Stored transitions, oldest first.
    pub fn transitions(&self) -> Vec<Transition> {
        let start = if self.size < self.capacity { 0 } else { self.write_index };
        (0..self.size).map(|k| self.slot((start + k) % self.size)).collect()
    }

    /// Slot indices of `n` uniform draws with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>, AgentError> {
        if self.size < n || self.size == 0 {
            return Err(AgentError::InsufficientData {
                have: self.size,
                need: n.max(1),
            });
        }
        Ok((0..n).map(|_| rng.gen_range(0..self.size)).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Batch, AgentError> {
        let idx = self.sample_indices(n, rng)?;
        let (sd, ad) = (self.state_dim, self.action_dim);
        let mut b = Batch {
            len: n,
            state_dim: sd,
            action_dim: ad,
            z: Vec::with_capacity(n * sd),
            a: Vec::with_capacity(n * ad),
            r: Vec::with_capacity(n),
            z_next: Vec::with_capacity(n * sd),
            done: Vec::with_capacity(n),
        };
        for i in idx {
            b.z.extend_from_slice(&self.z[i * sd..(i + 1) * sd]);
            b.a.extend_from_slice(&self.a[i * ad..(i + 1) * ad]);
            b.r.push(self.r[i]);
            b.z_next.extend_from_slice(&self.z_next[i * sd..(i + 1) * sd]);
            b.done.push(self.done[i]);
        }
        Ok(b)
    }
}
