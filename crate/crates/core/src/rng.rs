//! Seed expansion into independent per-round streams.
//!
//! Every round of every run draws from its own ChaCha stream selected by a
//! (seed, stream) pair, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Salt separating device-side randomness from client-side randomness
/// derived from the same run seed.
const DEVICE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

pub type StreamRng = ChaCha8Rng;

pub fn client_stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn device_stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ DEVICE_SALT);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed, e.g. one per (width, depth) entry of a sweep.
pub fn derive_seed(seed: u64, label: &[u64]) -> u64 {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for part in label {
        hasher.update(part.to_le_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
