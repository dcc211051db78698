//! Deterministic random-stream derivation.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream obtained
//! as `stream(master, domain, index)`. The derivation is
//!
//! ```text
//! seed = splitmix64( splitmix64( master ^ fnv1a(domain) ) ^ index )
//! ```
//!
//! followed by `ChaCha8Rng::seed_from_u64(seed)`. Distinct `(domain, index)`
//! pairs give statistically independent streams, and the same triple yields
//! bit-identical draws on every platform, which is what makes experiment
//! outputs reproducible byte for byte.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a strong 64-bit mixer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// FNV-1a hash of a domain label.
pub fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive the stream for `(master, domain, index)`.
pub fn stream(master: u64, domain: &str, index: u64) -> ChaCha8Rng {
    let seed = splitmix64(splitmix64(master ^ fnv1a(domain)) ^ index);
    ChaCha8Rng::seed_from_u64(seed)
}
