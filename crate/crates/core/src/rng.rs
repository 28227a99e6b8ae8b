//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, path, cell)`, so grids come out bit-identical no matter
//! which thread samples which replica, and nested grids built from the same stream share the
//! weights on their common cells.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::GridPoint;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A position in the tree of streams rooted at a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    master_seed: u64,
    key: u64,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        RngStream { master_seed, key: mix64(master_seed) }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Child stream for replica `index`.
    pub fn replica(&self, index: u64) -> Self {
        self.child(0x5245_504C ^ index.wrapping_mul(GOLDEN))
    }

    /// Child stream separated by an arbitrary label (experiment name, role in a coupling, ...).
    pub fn fork(&self, label: &str) -> Self {
        let h = label
            .bytes()
            .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01B3));
        self.child(h)
    }

    fn child(&self, salt: u64) -> Self {
        RngStream { master_seed: self.master_seed, key: mix64(self.key ^ mix64(salt)) }
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(self.key ^ mix64(counter))
    }

    /// Uniform on (0, 1].
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        ((self.bits(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential with the given rate by inversion; finite because the uniform never hits 0.
    #[inline]
    pub fn exponential(&self, counter: u64, rate: f64) -> f64 {
        -self.uniform(counter).ln() / rate
    }

    #[inline]
    pub fn cell_key(p: GridPoint) -> u64 {
        ((p.col as u64) << 32) | (p.row as u64 & 0xFFFF_FFFF)
    }

    #[inline]
    pub fn cell_exponential(&self, p: GridPoint, rate: f64) -> f64 {
        self.exponential(Self::cell_key(p), rate)
    }

    /// Sequential generator for shuffles and other non-lattice draws.
    pub fn sequential(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key)
    }
}
