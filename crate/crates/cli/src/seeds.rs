//! Per-trial seed derivation.
//!
//! Every trial of every check draws from its own stream, derived from the base
//! seed, a stream name and the trial index, so adding a check never perturbs
//! the trials of another.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, stable across platforms and releases.
fn stream_hash(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of trial `index` in stream `stream` under base seed `base`.
pub fn trial_seed(base: u64, stream: &str, index: usize) -> u64 {
    mix(mix(base ^ stream_hash(stream)) ^ index as u64)
}

/// The seeds of the first `n` trials of a stream.
pub fn trial_seeds(base: u64, stream: &str, n: usize) -> Vec<u64> {
    (0..n).map(|i| trial_seed(base, stream, i)).collect()
}
