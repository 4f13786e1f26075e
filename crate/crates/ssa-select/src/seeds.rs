//! Deterministic substream derivation.
//!
//! Every random draw in this crate comes from a ChaCha8 generator seeded
//! through [`derive_seed`], which mixes a master seed with a list of tags
//! (purpose, iteration, index). Two substreams with different tags are
//! statistically independent, and a computation that hands each worker its
//! own substream produces identical results under any scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tag constants naming each consumer of randomness. Keeping them in one
/// place guarantees two call sites never collide on a substream.
pub mod domain {
    pub const INIT: u64 = 0x01;
    pub const GLIDE: u64 = 0x02;
    pub const NORMAL_SPLIT: u64 = 0x03;
    pub const LEVY: u64 = 0x04;
    pub const KFOLD: u64 = 0x05;
    pub const TRAIN_TEST_SPLIT: u64 = 0x06;
    pub const SYNTH: u64 = 0x07;
    pub const MLP_INIT: u64 = 0x08;
    pub const SVM_STEP: u64 = 0x09;
}

/// SplitMix64 finalizer. Full-avalanche 64-bit mixing.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a substream seed from a master seed and a tag path.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut acc = mix(seed ^ 0x9e37_79b9_7f4a_7c15);
    for &tag in tags {
        acc = mix(acc ^ tag.wrapping_mul(0xff51_afd7_ed55_8ccd).wrapping_add(0x2545_f491_4f6c_dd1d));
    }
    acc
}

/// A ChaCha8 generator positioned at the start of the derived substream.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}
