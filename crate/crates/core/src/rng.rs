//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64(seed)` and split by setting the ChaCha stream
//! id. The generator is platform independent, so a `(seed, stream)` pair
//! yields the same sequence everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const RANK_STREAM: u64 = 1;
pub const ICM_STREAM: u64 = 2;
pub const ANNEAL_STREAM: u64 = 3;
pub const MPM_STREAM: u64 = 4;
pub const IMAGE_STREAM: u64 = 5;
pub const SYNTH_STREAM: u64 = 6;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
