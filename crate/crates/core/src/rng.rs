//! Seeded random streams.
//!
//! A run has one master seed. Every consumer (simulator noise, network
//! initialization, exploration, heading resets, ...) draws from its own
//! ChaCha stream derived from that seed, so changing how often one consumer
//! draws never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    SimNoise = 1,
    AgentInit = 2,
    Agent = 3,
    Reset = 4,
    Encoder = 5,
    Eval = 6,
    Warmup = 7,
}

pub fn stream(master_seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(which as u64);
    rng
}

/// A 64-bit sub-seed for components that take a plain seed.
pub fn sub_seed(master_seed: u64, which: Stream) -> u64 {
    use rand::RngCore;
    stream(master_seed, which).next_u64()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
