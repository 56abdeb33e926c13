//! Seeded random number generation with a pinned, documented algorithm stack
//! so datasets can be reproduced bit-exactly from a seed, in this crate or in
//! a reimplementation.
//!
//! The stack, in full:
//!
//! * Stream: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed via
//!   `SeedableRng::seed_from_u64`, which expands the 64-bit seed with
//!   SplitMix64 as documented by `rand_core`.
//! * Uniform f64 in [0, 1): `(next_u64() >> 11) as f64 * 2^-53`.
//! * Bounded integers in [0, bound): draw 64-bit words, reject values at or
//!   above `(u64::MAX / bound) * bound`, then reduce modulo `bound`.
//! * Standard normals: Box–Muller on one uniform pair; the pair yields two
//!   variates consumed in order (cosine first, sine second).
//! * Shuffles: Fisher–Yates from the last index down.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct SeedRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, bound) by rejection; unbiased for every bound ≥ 1.
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound >= 1, "bound must be at least 1");
        let bound = bound as u64;
        let zone = (u64::MAX / bound) * bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % bound) as usize;
            }
        }
    }

    /// Standard normal via Box–Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }

    /// m indices chosen uniformly without replacement from 0..n, returned in
    /// ascending order (partial Fisher–Yates, then sort).
    pub fn choose_indices(&mut self, n: usize, m: usize) -> Vec<usize> {
        assert!(m <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let j = i + self.next_index(n - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..m].to_vec();
        chosen.sort_unstable();
        chosen
    }
}
