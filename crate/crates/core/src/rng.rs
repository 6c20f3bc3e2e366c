//! Seeded, splittable random number streams.
//!
//! Every experiment derives its generators from a master seed and a stream
//! index, so that work fanned out across threads draws exactly the same
//! numbers as a sequential run.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as PrivRng;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> PrivRng {
    let mut rng = PrivRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed from a parent seed and a label, for nesting
/// independent stream families (e.g. per split, then per repeat).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
