//! Deterministic pseudo-random number generation.
//!
//! Every stochastic component of the toolchain (measurement sampling, shot
//! derivation, annealing reads) draws from [`SplitMix64`] so that results are
//! reproducible bit-for-bit across runs and across implementations. The
//! generator is seeded directly with the user-supplied 64-bit seed; derived
//! streams (shot `k`, annealing read `r`) use `base.wrapping_add(k)`.

/// The splitmix64 generator of Steele, Lea and Flood.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)` built from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`, bias-free via rejection.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        loop {
            let v = self.next_u64();
            let r = v % n;
            if v.wrapping_sub(r) <= u64::MAX - (n - 1) {
                return r;
            }
        }
    }
}
