//! Deterministic random streams.
//!
//! Every trial draws from its own ChaCha stream selected by `(master seed, trial index)`,
//! so aggregate results do not depend on how trials are scheduled across threads.

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug)]
pub struct RandomStream {
    inner: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { inner: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Independent sub-stream for trial `index` of an experiment seeded with `master`.
    pub fn for_trial(master: u64, index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master);
        inner.set_stream(index);
        Self { inner }
    }

    /// Derive a child seed; the parent advances by one word.
    pub fn fork_seed(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn fork(&mut self) -> Self {
        Self::new(self.fork_seed())
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}
