use rand::Rng as _;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::normal::phi_inv;

/// Seeded random stream.
///
/// Child streams are derived from the root seed and a key path such as
/// `(case, size, replicate)`, never from the parent's current state, so a
/// replicate's samples do not depend on which other replicates ran first.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: Xoshiro256PlusPlus,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a key path into a 64-bit seed.
pub fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    let mut h = mix(seed.wrapping_add(GOLDEN));
    for (depth, &k) in key.iter().enumerate() {
        h = mix(h ^ mix(k.wrapping_add(GOLDEN.wrapping_mul(depth as u64 + 2))));
    }
    h
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream keyed by `key` under this stream's root seed.
    pub fn child(&self, key: &[u64]) -> Self {
        Self::new(derive_seed(self.seed, key))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..bound`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.gen_range(0..bound)
    }

    /// Standard normal draw by inversion.
    pub fn standard_normal(&mut self) -> f64 {
        phi_inv(self.uniform_open())
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_core::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
