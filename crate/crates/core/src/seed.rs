//! Seed derivation. Every random stream in the crate is a ChaCha8 generator
//! keyed by a seed derived from the run seed and a tag naming its purpose, so
//! results never depend on iteration order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive(base: u64, parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(base: u64, parts: &[&[u8]]) -> ChaCha8Rng {
    rng(derive(base, parts))
}
