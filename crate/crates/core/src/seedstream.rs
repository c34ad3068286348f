//! Derivation of independent RNG seeds from one master seed.
//!
//! Every randomized component (per-link jitter, action schedules) gets its own
//! stream id; the derived seed is splitmix64 applied to master XOR stream.
//! splitmix64 is a fixed published mixing function, so derived seeds are
//! identical on every platform.

/// One step of the splitmix64 generator.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for `stream` from `master`.
///
/// Distinct streams yield statistically independent ChaCha seeds; the same
/// (master, stream) pair always yields the same child.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}
