//! SplitMix64, the seeded generator behind every random adversary.
//!
//! Constants follow Steele, Lea and Flood (2014): the state advances by the
//! golden-ratio increment `0x9E37_79B9_7F4A_7C15` and each output is the
//! state passed through the `mix64` finalizer (`0xBF58_476D_1CE4_E5B9`,
//! `0x94D0_49BB_1331_11EB`, shifts 30/27/31). The k-th output of the stream
//! seeded with `s` is `mix64(s + (k + 1) * GAMMA)`, so draws are random
//! access and bit-reproducible in any language with wrapping 64-bit
//! arithmetic. Uniform floats take the top 53 bits.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// k-th output (0-based) of the stream seeded with `seed`.
#[inline]
pub fn nth(seed: u64, k: u64) -> u64 {
    mix64(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Maps 64 random bits to `[0, 1)`.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        crate::math::sqrt(-2.0 * crate::math::ln(u1))
            * crate::math::cos(2.0 * core::f64::consts::PI * u2)
    }
}
