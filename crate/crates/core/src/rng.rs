//! Seeded RNG streams.
//!
//! Every randomized step draws from a ChaCha stream keyed by a base seed
//! and a stream id, so parallel work is independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stream id built from a tag and an index, e.g. (restart tag, restart #).
pub fn stream2(seed: u64, tag: u32, index: u32) -> StreamRng {
    stream(seed, ((tag as u64) << 32) | index as u64)
}
