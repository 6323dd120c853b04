//! Seed derivation and counter-addressed random streams.
//!
//! Every random quantity in the crate is addressed by a path of integer tags
//! below a master seed, e.g. `(seed, grid point, trial, purpose)`. Private
//! noise is further addressed by sample index through ChaCha stream ids, so a
//! draw depends only on `(seed, sample, level, coordinate)` and never on the
//! order in which work is scheduled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tags separating independent purposes below a common seed.
pub mod purpose {
    pub const DATA: u64 = 0x6461_7461;
    pub const NOISE: u64 = 0x6e6f_6973;
    pub const CALIBRATION: u64 = 0x6361_6c69;
    pub const PRIVATIZE: u64 = 0x7072_6976;
    pub const TRIAL: u64 = 0x7472_6961;
}

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub const fn new(value: u64) -> Self {
        Seed(value)
    }

    /// Derive an independent child seed for `tag`.
    pub fn child(self, tag: u64) -> Seed {
        Seed(splitmix64(splitmix64(self.0) ^ splitmix64(tag.wrapping_add(0xa076_1d64_78bd_642f))))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// A sequential stream rooted at this seed.
    pub fn stream(self) -> Stream {
        Stream::new(self, 0)
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A ChaCha8 keystream selected by `(seed, stream id)`.
#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: Seed, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed.0);
        inner.set_stream(stream_id);
        Stream { inner }
    }

    /// Re-target a copy of this stream at another stream id, position zero.
    pub fn fork(&self, stream_id: u64) -> Self {
        let mut inner = self.inner.clone();
        inner.set_stream(stream_id);
        inner.set_word_pos(0);
        Stream { inner }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard deviation-one Laplace quantile: density `exp(-sqrt2 |w|) / sqrt2`.
#[inline]
pub fn laplace_quantile(u: f64) -> f64 {
    const SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;
    if u < 0.5 {
        SCALE * (2.0 * u).ln()
    } else {
        -SCALE * (2.0 * (1.0 - u)).ln()
    }
}

/// A source of unit-variance Laplace draws.
pub trait NoiseSource {
    fn laplace(&mut self) -> f64;
}

impl NoiseSource for Stream {
    #[inline]
    fn laplace(&mut self) -> f64 {
        laplace_quantile(self.open01())
    }
}

/// Noise source that always returns zero.
#[derive(Debug, Default, Clone, Copy)]
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn laplace(&mut self) -> f64 {
        0.0
    }
}
