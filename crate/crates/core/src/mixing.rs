//! Fixed 64-bit mixing used to derive disorder labels from (seed, key).
//!
//! The composition is `splitmix64(splitmix64(seed ^ domain) ^ fnv1a64(key))`.
//! Constants are pinned so that realizations are reproducible across runs
//! and platforms; they are documented in the repository README.

pub const DOMAIN_EDGE: u64 = 0x45444745_00000001;
pub const DOMAIN_VERTEX: u64 = 0x56455254_00000002;
pub const DOMAIN_SEED_STREAM: u64 = 0x53454544_00000003;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Label hash for a canonical key under a given seed and domain separator.
pub fn key_hash(seed: u64, domain: u64, key: &str) -> u64 {
    splitmix64(splitmix64(seed ^ domain) ^ fnv1a64(key.as_bytes()))
}

/// Map a hash to the unit interval (53-bit resolution).
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Inverse-CDF selection of a label index from probability weights.
pub fn pick_label(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Deterministic per-sample seed stream for Monte-Carlo averages.
pub fn stream_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ DOMAIN_SEED_STREAM ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
