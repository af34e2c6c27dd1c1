//! Deterministic seed derivation.
//!
//! Everything stochastic in this crate is driven by a single `u64` seed.
//! Independent streams (one per simulated replicate, one per chain) are
//! derived from it with a SplitMix64 scramble so that stream `r` is stable
//! regardless of how many other streams were drawn.

/// Derive the seed for logical stream `stream` from `base`.
///
/// SplitMix64 finalizer applied to `base + (stream + 1) * GOLDEN`; the `+ 1`
/// keeps stream 0 from collapsing onto the raw base seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = base.wrapping_add(GOLDEN.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
