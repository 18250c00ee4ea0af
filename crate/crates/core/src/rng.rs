//! Seeded random streams.
//!
//! Every stochastic component takes a [`SimRng`] derived from a master seed
//! and a path of stream indices, so parallel and serial runs draw identical
//! numbers regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of stream indices into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p.wrapping_add(0x5851_f42d)))
    })
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(master: u64, path: &[u64]) -> SimRng {
    rng_from_seed(derive_seed(master, path))
}

/// `len` values drawn uniformly from `[-half_width, half_width)`.
pub fn uniform_vec<R: Rng + ?Sized>(rng: &mut R, len: usize, half_width: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            if half_width > 0.0 {
                rng.gen_range(-half_width..half_width)
            } else {
                0.0
            }
        })
        .collect()
}
