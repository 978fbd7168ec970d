//! Counter-based random streams.
//!
//! A master seed and a label select a ChaCha8 key; the trial index selects the
//! ChaCha stream. Adding trials or labels never perturbs existing streams, and
//! the stream a trial sees does not depend on which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// RNG for trial `index` of the stream family `label` under `master_seed`.
pub fn stream(master_seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
