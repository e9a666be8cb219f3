//! Counter-based pseudorandom generator for reproducible ensembles.
//!
//! Output `n` of a stream is a pure function of `(key, n)`: streams keyed by
//! `(master_seed, trajectory_index)` give identical results no matter how an
//! ensemble is scheduled across threads. The mixing function is the
//! SplitMix64 finalizer (Stafford's mix13), which is statistically sound for
//! Monte Carlo use; nothing here is cryptographic.

#[cfg(not(feature = "std"))]
use num_traits::Float;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_GAMMA: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Stream 0 of `seed`.
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `index` of `master_seed`.
    pub fn stream(master_seed: u64, index: u64) -> Self {
        let key = mix64(mix64(master_seed) ^ index.wrapping_mul(STREAM_GAMMA));
        Self { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let n = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(n.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// A pair of independent standard normals (Box–Muller).
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        // shift into (0, 1] so the log is finite
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * core::f64::consts::PI * u2;
        (r * phi.cos(), r * phi.sin())
    }
}
