//! Seeded random streams.
//!
//! Generator: ChaCha8 keyed by a SplitMix64 expansion of `seed`, using the
//! ChaCha stream counter for `stream`. Float conversion, bounded integers and
//! index sampling are implemented here rather than borrowed from `rand`, so
//! draw sequences depend only on the ChaCha8 keystream and stay stable
//! across dependency upgrades.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Derives an independent child stream. The result depends only on
    /// `(seed, stream, child)`, never on how many draws were taken.
    pub fn fork(&self, child: u64) -> RngStream {
        let mut state = self.seed ^ self.stream.wrapping_mul(GOLDEN);
        let derived = splitmix64(&mut state);
        RngStream::with_stream(derived, child)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        loop {
            let bits = self.next_u64() >> 11;
            if bits != 0 {
                return bits as f64 * (1.0 / (1u64 << 53) as f64);
            }
        }
    }

    /// Uniform in the open interval (lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        loop {
            let v = lo + (hi - lo) * self.open01();
            if v > lo && v < hi {
                return v;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform integer in `0..n` (Lemire's multiply-and-reject).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// `amount` distinct indices from `0..len`, returned sorted ascending.
    pub fn sample_indices(&mut self, len: usize, amount: usize) -> Vec<usize> {
        assert!(amount <= len, "cannot sample {amount} of {len}");
        let mut pool: Vec<usize> = (0..len).collect();
        for i in 0..amount {
            let j = i + self.below((len - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(amount);
        pool.sort_unstable();
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn fork_is_deterministic() {
        let s = RngStream::new(42);
        let mut a = s.fork(3);
        let mut b = s.fork(3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_children_have_distinct_first_draws() {
        let s = RngStream::new(7);
        let firsts: HashSet<u64> = (0..10_000).map(|id| s.fork(id).next_u64()).collect();
        assert_eq!(firsts.len(), 10_000);
    }

    #[test]
    fn fork_ignores_parent_and_sibling_draws() {
        let s = RngStream::new(5);
        let expected: Vec<u64> = {
            let mut c = s.fork(1);
            (0..8).map(|_| c.next_u64()).collect()
        };
        let mut parent = s.clone();
        for _ in 0..17 {
            parent.next_u64();
        }
        let mut sibling = parent.fork(2);
        for _ in 0..33 {
            sibling.next_u64();
        }
        let mut c = parent.fork(1);
        let got: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn nested_forks_differ_from_direct_forks() {
        let s = RngStream::new(1);
        assert_ne!(s.fork(3).next_u64(), s.fork(1).fork(3).next_u64());
    }

    #[test]
    fn uniform_is_open() {
        let mut s = RngStream::new(9);
        for _ in 0..10_000 {
            let v = s.uniform(-50.0, 50.0);
            assert!(v > -50.0 && v < 50.0);
        }
    }

    #[test]
    fn sample_indices_are_distinct_and_sorted() {
        let mut s = RngStream::new(3);
        let idx = s.sample_indices(100, 40);
        assert_eq!(idx.len(), 40);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(idx.iter().all(|&i| i < 100));
        assert_eq!(s.sample_indices(5, 5), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn below_is_roughly_uniform() {
        let mut s = RngStream::new(17);
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            counts[s.below(6) as usize] += 1;
        }
        for c in counts {
            assert!((9_400..10_600).contains(&c), "{counts:?}");
        }
    }
}
