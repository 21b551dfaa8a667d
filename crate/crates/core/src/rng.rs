//! Seeded 64-bit linear congruential generator.
//!
//! `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`,
//! starting from `state = seed`. A uniform real in `[0, 1)` is the top 53 bits
//! of the advanced state divided by `2⁵³`. The recurrence is fixed so that
//! sample sets can be regenerated bit-for-bit in any language.

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const INCREMENT: u64 = 1_442_695_040_888_963_407;

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as f64;
        lo + ((self.next_f64() * span) as i64).min(hi - lo)
    }
}
