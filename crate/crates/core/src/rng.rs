//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every random consumer (initial-state construction, classical kick noise,
//! gate noise) gets its own ChaCha stream derived from the master seed, a
//! domain tag and an index. Draws therefore never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags that keep the stream families disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamDomain {
    InitialState = 0x11,
    ClassicalKick = 0x22,
    GateNoise = 0x33,
    Sampling = 0x44,
    Trajectory = 0x55,
    Sweep = 0x66,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(master, domain, index)`.
pub fn derive_seed(master: u64, domain: StreamDomain, index: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(domain as u64));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn stream(master: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, domain, index))
}
