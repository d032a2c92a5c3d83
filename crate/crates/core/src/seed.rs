//! Deterministic seed derivation.
//!
//! Every random draw in the crate is keyed by an explicit `u64` seed, and all
//! child seeds are derived with [`child_seed`]: starting from the parent seed,
//! each context word is folded in through one SplitMix64 round,
//!
//! ```text
//! h <- splitmix64(h XOR (word * 0x9E3779B97F4A7C15))
//! ```
//!
//! so the same `(parent, words)` always yields the same child regardless of
//! execution order or thread count.

/// Role tags used as the final derivation word. Keeping them distinct keeps
/// independent random streams from colliding within one trial.
pub mod role {
    pub const UPLINK_1: u64 = 1;
    pub const UPLINK_2: u64 = 2;
    pub const CHANNEL_1: u64 = 3;
    pub const CHANNEL_2: u64 = 4;
    pub const FRAME: u64 = 5;
    pub const DOWNLINK: u64 = 6;
    pub const NOISE: u64 = 7;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive a child seed from a parent and a sequence of context words
/// (e.g. sweep-point index, trial index, role tag).
pub fn child_seed(parent: u64, words: &[u64]) -> u64 {
    let mut h = parent;
    for &w in words {
        h = splitmix64(h ^ w.wrapping_mul(GOLDEN));
    }
    h
}
