use rayon::prelude::*;

use crate::rng::{RandomStream, StreamRng};

/// Samples per work item.
const CHUNK: u64 = 64;

/// An associative accumulator. Implementations hold integer tallies only, so
/// merging in any order gives bit-identical results.
pub trait Tally: Send {
    fn merge(&mut self, other: Self);
}

/// Runs `n_samples` independent samples on the current rayon pool.
///
/// Sample `s` draws from stream `base + s`; chunking is fixed and tallies are
/// integer, so the result does not depend on the number of threads.
pub fn run_samples<T, I, F>(n_samples: u64, base: RandomStream, init: I, sample: F) -> T
where
    T: Tally,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &mut StreamRng, u64) + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = init();
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n_samples);
            for s in start..end {
                let mut rng = base.offset(s).rng();
                sample(&mut acc, &mut rng, s);
            }
            acc
        })
        .reduce(&init, |mut a, b| {
            a.merge(b);
            a
        })
}
