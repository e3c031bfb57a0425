//! Seed derivation for reproducible randomness.
//!
//! Every random choice in the crate is drawn from a stream identified by a
//! path of integers below a master seed, e.g. `(seed, trial, phase,
//! component)`. Paths are folded through the SplitMix64 finalizer
//! ([`mix64`]):
//!
//! ```text
//! h0     = mix64(seed ^ 0x9E3779B97F4A7C15)
//! h(i+1) = mix64(rotl(h(i), 23) ^ mix64(path[i] + 0x9E3779B97F4A7C15))
//! ```
//!
//! The rotation keeps `SeedTree::new(0).child(0)` from collapsing to the
//! fixed point `mix64(0) = 0`. The final 64-bit value seeds a ChaCha8 generator. A stream depends
//! only on its path, never on which thread or in which order it is drawn,
//! so serial and parallel runs agree bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (Steele, Lea & Flood).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the stream derivation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree {
    state: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree {
            state: mix64(seed ^ GOLDEN_GAMMA),
        }
    }

    /// Descend one level of the tree.
    pub fn child(&self, index: u64) -> Self {
        SeedTree {
            state: mix64(self.state.rotate_left(23) ^ mix64(index.wrapping_add(GOLDEN_GAMMA))),
        }
    }

    /// Descend along a whole path.
    pub fn path(&self, indices: &[u64]) -> Self {
        indices.iter().fold(*self, |node, &i| node.child(i))
    }

    /// The 64-bit value identifying this node. Used as the seed handed to
    /// a trial so a trial can be replayed on its own.
    pub fn value(&self) -> u64 {
        self.state
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }
}

/// Stream tags for draws that are not tied to a phase/component pair.
pub(crate) mod tag {
    pub const PHASE_BASE: u64 = 0;
    pub const RADIUS: u64 = 1 << 32;
    pub const MIXTURE: u64 = (1 << 32) + 1;
    pub const GRID_OFFSETS: u64 = (1 << 32) + 2;
    pub const EMBED: u64 = (1 << 32) + 3;
    pub const PREFIX_BASE: u64 = (1 << 32) + 100;
}

/// Uniform draw from (0, 1]. Used for inverse-transform samplers so that a
/// zero never reaches a power with a negative exponent.
pub fn open_closed_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
