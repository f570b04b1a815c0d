//! Counter-addressable random streams.
//!
//! Every Monte Carlo series owns a ChaCha8 stream selected by
//! `(master_seed, series_index)`. The stream does not depend on which worker
//! runs the series, so ensembles are reproducible for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used throughout the simulator.
pub type Stream = ChaCha8Rng;

/// Returns the stream for one series of an ensemble.
pub fn series_stream(master_seed: u64, series_index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(series_index);
    rng
}

/// SplitMix64 finalizer, used to derive independent master seeds for
/// sub-experiments (different M values, different cases).
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
