//! Deterministic pseudo-randomness for seeded test-case generation.
//!
//! SplitMix64: tiny, stateless-to-reseed, identical on every platform. The
//! default seed 0xCAFE is part of the report contract (same seed, same bytes).

use crate::scalar::{rat, Rat};

pub const DEFAULT_SEED: u64 = 0xCAFE;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`. `n` must be nonzero; modulo bias is irrelevant at
    /// the tiny ranges used here.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Small rational with numerator in `-num_max..=num_max` and denominator
    /// in `1..=den_max`.
    pub fn small_rat(&mut self, num_max: i64, den_max: i64) -> Rat {
        let n = self.range_i64(-num_max, num_max);
        let d = self.range_i64(1, den_max);
        rat(n, d)
    }

    /// Small nonzero rational, for specialization points that must avoid
    /// degenerate loci.
    pub fn small_nonzero_rat(&mut self, num_max: i64, den_max: i64) -> Rat {
        loop {
            let r = self.small_rat(num_max, den_max);
            if !num_traits::Zero::is_zero(&r) {
                return r;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_instances() {
        let mut a = SplitMix64::new(DEFAULT_SEED);
        let mut b = SplitMix64::new(DEFAULT_SEED);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    // Reference values for the SplitMix64 parameters (seed 0): pins the
    // implementation so seeded corpora never drift between builds.
    #[test]
    fn splitmix_reference_stream() {
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(g.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(g.next_u64(), 0x06C45D188009454F);
    }

    #[test]
    fn small_rat_stays_in_box() {
        let mut g = SplitMix64::new(7);
        for _ in 0..200 {
            let r = g.small_rat(3, 2);
            let n: i64 = 3;
            assert!(r >= rat(-n, 1) && r <= rat(n, 1));
        }
    }
}
