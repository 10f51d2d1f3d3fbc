use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Version of the value stream produced by [`SeededRandom`].
pub const RNG_ALGORITHM_VERSION: u8 = 1;

/// Reproducible random stream: ChaCha20 keyed by the seed, with
/// platform-independent float and normal-variate derivations.
#[derive(Debug, Clone)]
pub struct SeededRandom {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8] = RNG_ALGORITHM_VERSION;
        SeededRandom {
            seed,
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm_version(&self) -> u8 {
        RNG_ALGORITHM_VERSION
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n` without modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Standard normal variate (Box-Muller, one value per pair of uniforms).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
