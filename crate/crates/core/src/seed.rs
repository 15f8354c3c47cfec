//! Seed derivation.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] keyed by a
//! 64-bit seed. Experiments derive per-trial seeds from a single master seed
//! with a counter scheme:
//!
//! ```text
//! seed(master, stream, index) = splitmix64(splitmix64(master ^ splitmix64(stream)) + index)
//! ```
//!
//! `stream` names what the randomness is for (antenna placement, pairing,
//! reuse activation, ...) and `index` is the trial counter. The result depends
//! only on the three inputs, so trials can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Streams used by the experiment runners.
pub mod stream {
    pub const GEOMETRY: u64 = 1;
    pub const PAIRING: u64 = 2;
    pub const ANTENNAS: u64 = 3;
    pub const ACTIVATION: u64 = 4;
    pub const PHASES: u64 = 5;
    pub const ROUTING: u64 = 6;
}

/// One round of the SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)).wrapping_add(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(master, stream, index))
}
