//! Reproducible uniform streams.
//!
//! A stream is identified by a `(seed, stream_id)` pair and backed by a
//! ChaCha20 block cipher in counter mode: the seed keys the cipher and the
//! stream id selects one of 2^64 disjoint nonces. Two streams with the same
//! pair always produce the same sequence, whatever thread they run on.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// 2^-53
const INV_2_POW_53: f64 = 1.0 / 9_007_199_254_740_992.0;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and a different id.
    pub fn sibling(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    /// Uniform draw on the open interval (0, 1); never returns 0 or 1.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        // 53 random bits centred in their cell: (k + 0.5) / 2^53
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * INV_2_POW_53
    }
}
