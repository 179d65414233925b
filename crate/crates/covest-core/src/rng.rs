//! Seeding, stream splitting, and Gaussian variate generation.
//!
//! All randomness in the crate flows from a [`RngSeed`]. Independent
//! substreams are derived by SplitMix64 mixing of the parent seed with a
//! stream index, and each derived seed drives its own ChaCha8 generator, so
//! replicate-level work can run in any order (or concurrently) without
//! sharing generator state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A 64-bit seed. Identical seed and call sequence give identical output on
/// every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSeed {
    /// Derives the seed of substream `index`.
    ///
    /// Substreams form a tree: `seed.substream(a).substream(b)` is the
    /// (a, b) child stream. The experiment harness gives replicate `r` at
    /// grid point `g` the stream `base.substream(g).substream(r)`.
    #[must_use]
    pub fn substream(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(
            self.0
                .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        ))
    }

    /// Instantiates the ChaCha8 generator for this seed.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Uniform draw in [0, 1) with 53 random bits.
#[inline]
pub(crate) fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal stream using the polar Box-Muller method.
pub(crate) struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub(crate) fn new(seed: RngSeed) -> Self {
        GaussianStream {
            rng: seed.rng(),
            spare: None,
        }
    }

    pub(crate) fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * next_unit(&mut self.rng) - 1.0;
            let v = 2.0 * next_unit(&mut self.rng) - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}
