//! Counter-based random streams.
//!
//! A [`RandomSource`] is a ChaCha8 keystream selected by `(seed, stream)`.
//! Child streams are derived by hashing a path of indices (experiment,
//! sample-size index, replicate) into the 64-bit stream id, so any replicate
//! can be regenerated on its own and parallel loops stay reproducible.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a path of indices into one stream id.
pub fn stream_id(path: &[u64]) -> u64 {
    path.iter()
        .fold(0x5eed_0f_5e1f_u64, |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RandomSource {
            seed,
            stream,
            inner,
        }
    }

    /// Stream addressed by a path of indices under `seed`.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        Self::new(seed, stream_id(path))
    }

    /// Child stream of this source; independent of how much of the parent
    /// has been consumed.
    pub fn split(&self, index: u64) -> Self {
        Self::new(self.seed, splitmix64(self.stream ^ splitmix64(index)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        loop {
            let u = (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
