//! Reproducible random streams.
//!
//! A stream is identified by a `(seed, stream index)` pair and backed by
//! ChaCha8, which supports 2^64 independent streams per seed. Parallel code
//! never shares a generator: sample `s` of a run draws from stream
//! `base + s`, so any single sample can be replayed in isolation and the
//! result does not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomStream { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// The stream `offset` positions after this one.
    pub fn offset(&self, offset: u64) -> Self {
        RandomStream { seed: self.seed, stream: self.stream.wrapping_add(offset) }
    }

    /// A disjoint block of streams reserved for sub-experiment `lane`.
    /// Lanes are 2^40 streams apart.
    pub fn lane(&self, lane: u64) -> Self {
        self.offset(lane << 40)
    }
}
