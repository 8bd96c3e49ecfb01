//! Seeding conventions.
//!
//! All randomness flows from ChaCha8 streams keyed by a single `u64` seed.
//! Sub-seeds (per trial, per grid point, per purpose) are derived with
//! SplitMix64 so that results never depend on worker count or scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One round of SplitMix64.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed by folding `parts` into `master`, one mix per part.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Sequential stream for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` from 53 random bits.
pub fn unit_uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    unit_uniform(rng.next_u64())
}

/// Independent uniforms addressed by ordered node pair, all keyed by one
/// trial seed. Pair `(a, b)` selects ChaCha stream `a * n + b`, so each
/// directed edge owns one draw regardless of the order in which the
/// simulation asks for it.
#[derive(Clone)]
pub struct PairStreams {
    base: ChaCha8Rng,
    n: u64,
}

impl PairStreams {
    pub fn new(seed: u64, node_count: usize) -> Self {
        PairStreams {
            base: ChaCha8Rng::seed_from_u64(seed),
            n: node_count as u64,
        }
    }

    /// The single uniform draw owned by the directed pair `(from, to)`.
    pub fn uniform(&self, from: usize, to: usize) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(from as u64 * self.n + to as u64);
        unit_uniform(rng.next_u64())
    }

    /// Extra per-node draw (stream of the diagonal pair, unused by edges).
    pub fn node_uniform(&self, node: usize) -> f64 {
        self.uniform(node, node)
    }
}
