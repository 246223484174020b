//! Seedable deterministic random stream.
//!
//! Every augmentation draws from a [`RandStream`] owned by the call. Per-sample
//! streams are derived with [`RandStream::split`] so results do not depend on
//! which worker processes which sample.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RandStream {
    inner: ChaCha8Rng,
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for one sample of one epoch.
    pub fn split(seed: u64, epoch: u64, sample: u64) -> Self {
        Self::new(mix64(mix64(mix64(seed) ^ epoch) ^ sample))
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform in `[lo, hi]`; returns `lo` exactly when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..=max`.
    pub fn up_to(&mut self, max: usize) -> usize {
        self.inner.gen_range(0..=max)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// `amount` distinct indices from `0..len`, uniformly without replacement.
    pub fn distinct(&mut self, len: usize, amount: usize) -> Vec<usize> {
        index::sample(&mut self.inner, len, amount).into_vec()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.gen()
    }

    /// Draw from `N(0, std²)`.
    pub fn gaussian(&mut self, std: f64) -> f64 {
        std * self.inner.sample::<f64, _>(StandardNormal)
    }
}

/// FNV-1a, used to key per-sample streams on stable identifiers.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}
