//! Deterministic random streams.
//!
//! Every stream is ChaCha8 keyed by a 64-bit seed, with a 64-bit stream id
//! selecting an independent counter space. Uniforms take the top 53 bits of
//! each output word; Gaussians use the Box-Muller transform on two uniforms,
//! `sqrt(-2 ln u1) * cos(2 pi u2)` with `u1` in `(0, 1]`. Given the same
//! `(seed, stream)` the produced values are identical on every platform, so
//! samples can be regenerated from their coordinates alone.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep streams for different uses of the same index apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Matrix = 1,
    Indices = 2,
    Threshold = 3,
    Premise = 4,
    Instance = 5,
    Function = 6,
}

pub fn stream_id(purpose: Purpose, index: u64) -> u64 {
    (purpose as u64) << 56 ^ index
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        CounterRng { inner }
    }

    pub fn for_purpose(seed: u64, purpose: Purpose, index: u64) -> Self {
        Self::new(seed, stream_id(purpose, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller (one value per pair of uniforms).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        // Lemire's multiply-shift; bias is below 2^-40 at our bounds.
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    /// Uniformly random `m`-subset of `[1, n]`, sorted increasing.
    pub fn subset(&mut self, n: usize, m: usize) -> Vec<usize> {
        assert!(m <= n);
        // Floyd's algorithm.
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        for j in (n - m + 1)..=n {
            let t = self.range_inclusive(1, j);
            if chosen.contains(&t) {
                chosen.push(j);
            } else {
                chosen.push(t);
            }
        }
        chosen.sort_unstable();
        chosen
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
