//! Counter-style random streams.
//!
//! Every Monte Carlo task draws from its own ChaCha stream keyed by
//! `(seed, key...)`, so results never depend on which worker ran the task or
//! in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent stream below a master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream: u64,
}

impl StreamKey {
    pub fn new(seed: u64, parts: &[u64]) -> Self {
        let mut h = splitmix64(0x5851_f42d_4c95_7f2d ^ parts.len() as u64);
        for p in parts {
            h = splitmix64(h ^ *p);
        }
        Self { seed, stream: h }
    }

    /// Derives a child key; `self.child(&[a]).child(&[b])` and
    /// `self.child(&[a, b])` differ, which is fine since callers pick one form.
    pub fn child(&self, parts: &[u64]) -> Self {
        let mut h = self.stream;
        for p in parts {
            h = splitmix64(h ^ splitmix64(*p));
        }
        Self {
            seed: self.seed,
            stream: h,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
