//! The single source of randomness for a simulation run.
//!
//! Every stochastic decision draws from one [`RngStream`]. Each primitive
//! consumes exactly one 64-bit word from the generator, which makes draw
//! counts a pure function of the calls made and lets tests audit them.

use rand_core::Rng;
use rand_pcg::Pcg64Mcg;

/// Identifier written to every output metadata file.
pub const RNG_ALGORITHM: &str = "pcg64-mcg-xsl-rr/splitmix64-seeding";

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Pcg64Mcg,
    draws: u64,
}

impl RngStream {
    /// Stream seeded directly from a 64-bit seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let lo = splitmix64(&mut sm) as u128;
        let hi = splitmix64(&mut sm) as u128;
        // Pcg64Mcg::new forces the low bit on, so any state is usable.
        RngStream { inner: Pcg64Mcg::new((hi << 64) | lo), draws: 0 }
    }

    /// Independent stream for run `run_index` of a batch seeded with `base_seed`.
    /// The pair is mixed through SplitMix64 so neighbouring indices do not
    /// yield neighbouring generator states.
    pub fn derive_run_stream(base_seed: u64, run_index: u64) -> Self {
        let mut sm = base_seed;
        let a = splitmix64(&mut sm);
        let mut sm2 = a ^ run_index.wrapping_mul(GOLDEN_GAMMA).rotate_left(17);
        let mixed = splitmix64(&mut sm2) ^ splitmix64(&mut sm2).rotate_left(32);
        RngStream::from_seed(mixed)
    }

    /// Number of 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    /// Uniform real in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform real in [lo, hi).
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in [0, n). Uses the high word of a 128-bit product,
    /// whose bias is below n / 2^64.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Uniform integer in [lo, hi], inclusive.
    pub fn int_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        assert!(lo <= hi);
        lo + self.below((hi - lo) as usize + 1) as u32
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// True with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.below(items.len())])
        }
    }

    /// Moves a uniform sample of `k` elements into `items[..k]` in random
    /// order, drawing exactly `k` words (Fisher–Yates, stopped early).
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], k: usize) {
        let n = items.len();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.below(n - i);
            items.swap(i, j);
        }
    }

    /// `round(share * len)` distinct items, chosen uniformly without
    /// replacement and returned in random order. Half-way sizes round to even.
    pub fn sample_fraction<T: Clone>(&mut self, items: &[T], share: f64) -> Vec<T> {
        assert!((0.0..=1.0).contains(&share), "share {share} outside [0, 1]");
        let k = sample_size(items.len(), share);
        let mut pool = items.to_vec();
        self.partial_shuffle(&mut pool, k);
        pool.truncate(k);
        pool
    }
}

/// Sample size for a fractional share, rounded half to even.
pub fn sample_size(len: usize, share: f64) -> usize {
    ((share * len as f64).round_ties_even() as usize).min(len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn first(stream: &mut RngStream, n: usize) -> Vec<u64> {
        (0..n).map(|_| stream.next_u64()).collect()
    }

    #[test]
    fn derivation_is_reproducible() {
        let a = first(&mut RngStream::derive_run_stream(7, 0), 100);
        let b = first(&mut RngStream::derive_run_stream(7, 0), 100);
        assert_eq!(a, b);
    }

    #[test]
    fn run_indices_do_not_collide() {
        let mut seen = HashSet::new();
        for idx in 0..1_000 {
            let draws = first(&mut RngStream::derive_run_stream(7, idx), 4);
            assert!(seen.insert(draws), "collision at run {idx}");
        }
    }

    #[test]
    fn base_seeds_differ() {
        let a = first(&mut RngStream::derive_run_stream(7, 0), 16);
        let b = first(&mut RngStream::derive_run_stream(8, 0), 16);
        assert_ne!(a, b);
    }

    #[test]
    fn sample_fraction_sizes() {
        let mut rng = RngStream::from_seed(3);
        let families: Vec<usize> = (0..400).collect();
        assert_eq!(rng.sample_fraction(&families, 0.021).len(), 8);
        assert!(rng.sample_fraction(&families, 0.0).is_empty());

        let mut all = rng.sample_fraction(&families, 1.0);
        assert_eq!(all.len(), 400);
        all.sort_unstable();
        assert_eq!(all, families);
    }

    #[test]
    fn half_way_rounds_to_even() {
        assert_eq!(sample_size(10, 0.25), 2); // 2.5
        assert_eq!(sample_size(10, 0.35), 4); // 3.5
        assert_eq!(sample_size(400, 0.021), 8); // 8.4
    }

    #[test]
    fn sample_is_distinct() {
        let mut rng = RngStream::from_seed(11);
        let items: Vec<u32> = (0..50).collect();
        let s = rng.sample_fraction(&items, 0.5);
        let set: HashSet<_> = s.iter().collect();
        assert_eq!(set.len(), s.len());
    }

    #[test]
    fn ranges_hold() {
        let mut rng = RngStream::from_seed(5);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
            let k = rng.int_inclusive(1, 21);
            assert!((1..=21).contains(&k));
            assert!(rng.below(7) < 7);
        }
    }

    #[test]
    fn each_primitive_draws_once() {
        let mut rng = RngStream::from_seed(1);
        rng.uniform();
        rng.below(10);
        rng.coin();
        rng.chance(0.5);
        rng.int_inclusive(3, 9);
        assert_eq!(rng.draws(), 5);
        let mut v: Vec<u8> = (0..20).collect();
        rng.partial_shuffle(&mut v, 6);
        assert_eq!(rng.draws(), 11);
    }

    #[test]
    fn int_inclusive_hits_both_ends() {
        let mut rng = RngStream::from_seed(9);
        let draws: HashSet<u32> = (0..2_000).map(|_| rng.int_inclusive(1, 5)).collect();
        assert_eq!(draws.len(), 5);
    }
}
