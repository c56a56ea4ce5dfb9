//! Deterministic random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit seed. Path `i` of a Monte
//! Carlo run uses the same key with ChaCha stream id `i + 1`, so the draws of a
//! path depend only on `(seed, i)` and never on how paths are scheduled.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01, StandardNormal};

#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent sub-stream number `index` of `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index.wrapping_add(1));
        RngStream { inner }
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn exponential(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_distinct() {
        let a: Vec<f64> = (0..5).map({
            let mut s = RngStream::new(9);
            move |_| s.uniform()
        }).collect();
        let b: Vec<f64> = (0..5).map({
            let mut s = RngStream::new(9);
            move |_| s.uniform()
        }).collect();
        assert_eq!(a, b);
        let mut s1 = RngStream::substream(9, 0);
        let mut s2 = RngStream::substream(9, 1);
        assert_ne!(s1.next_u64(), s2.next_u64());
    }

    #[test]
    fn draws_in_range() {
        let mut s = RngStream::new(1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u < 1.0);
            assert!(s.exponential() > 0.0);
        }
    }
}
