//! Seeded sampling with a fixed, platform-independent algorithm.
//!
//! * Generator: xoshiro256** whose 256-bit state is four consecutive
//!   SplitMix64 outputs started from the 64-bit seed.
//! * Bounded draw in `[0, n)`: take a 64-bit output `x`, reject while
//!   `x < 2^64 mod n`, return `x mod n`.
//! * `n` of `N` indices: partial Fisher–Yates over `0..N`; for `i` in
//!   `0..n` swap slot `i` with slot `i + draw(N − i)`. The first `n` slots,
//!   sorted, are the sample.
//! * Trial seeds: `seed + (stream << 32) + trial`, wrapping.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub struct SampleRng(Xoshiro256StarStar);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        SampleRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.0.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// `n` distinct values of `0..total`, ascending.
    pub fn sample_indices(&mut self, total: usize, n: usize) -> Vec<usize> {
        assert!(n <= total, "cannot draw {n} of {total}");
        let mut pool: Vec<usize> = (0..total).collect();
        for i in 0..n {
            let j = i + self.below((total - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(n);
        pool.sort_unstable();
        pool
    }
}

pub fn trial_seed(seed: u64, stream: u64, trial: u64) -> u64 {
    seed.wrapping_add(stream << 32).wrapping_add(trial)
}
