//! Deterministic pseudo-random numbers for simulation and test fixtures.
//!
//! Simulations must be bit-reproducible across platforms and re-implementable
//! from this description alone, so the generator is pinned by algorithm
//! rather than delegated to a platform default:
//!
//! - State initialization: the seed is passed once through the SplitMix64
//!   mixer (`z = seed + 0x9E3779B97F4A7C15`; `z = (z ^ (z >> 30)) *
//!   0xBF58476D1CE4E5B9`; `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`;
//!   `state = z ^ (z >> 31)`), substituting `0x9E3779B97F4A7C15` in the
//!   (astronomically unlikely) case the mix yields zero.
//! - State transition (xorshift64*): `s ^= s >> 12; s ^= s << 25;
//!   s ^= s >> 27`, output `s * 0x2545F4914F6CDD1D`.
//! - Unit doubles take the top 53 output bits: `(x >> 11) · 2⁻⁵³ ∈ [0, 1)`.
//!
//! All arithmetic is wrapping 64-bit.

/// Xorshift64* generator with SplitMix64 seeding.
#[derive(Clone, Debug)]
pub struct Xorshift64 {
    state: u64,
}

impl Xorshift64 {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Xorshift64 {
            state: if z == 0 { 0x9E37_79B9_7F4A_7C15 } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform double in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Multiply-shift bound; bias is negligible for the small n used here.
        ((self.uniform() * n as f64) as u64).min(n - 1)
    }

    /// Standard normal via Box-Muller. Draws two uniforms per call.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
