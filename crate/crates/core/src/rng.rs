//! Seeded random streams.
//!
//! Every generator draws from ChaCha8 streams keyed by `(seed, stream id)`.
//! Each snapshot gets its own stream so that perturbing the draws at one
//! time point cannot shift the draws at any other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream for latent structure (positions, community chain).
pub const STREAM_LATENT: u64 = 0;
/// Stream for DDCSBM propensities.
pub const STREAM_PROPENSITY: u64 = 1;
const STREAM_EDGES_BASE: u64 = 1 << 32;

pub fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Edge stream for 1-based time `t`.
pub fn edge_stream(seed: u64, t: usize) -> SimRng {
    stream(seed, STREAM_EDGES_BASE + t as u64)
}
