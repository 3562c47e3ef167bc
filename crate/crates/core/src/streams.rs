//! Counter-based random substreams.
//!
//! A stream is a ChaCha8 keystream keyed by `(master seed, replicate)` and
//! selected by a [`Tag`]; word `2v` of a field stream is the draw for vertex
//! `v`. Values therefore depend only on the key, the tag and the vertex,
//! never on evaluation order or thread count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{open_unit, WeightDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: u64,
    pub replicate: u64,
}

impl StreamKey {
    pub fn new(master: u64, replicate: u64) -> Self {
        Self { master, replicate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Tag {
    Base = 0,
    Refresh = 1,
    Clock = 2,
    VertexSample = 3,
    Inner = 4,
    Oracle = 5,
}

pub fn stream(key: StreamKey, tag: Tag) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&key.master.to_le_bytes());
    seed[8..16].copy_from_slice(&key.replicate.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(tag as u64);
    rng
}

/// `len` weights drawn from `dist`, one stream word per vertex.
pub fn weight_field(dist: &WeightDistribution, key: StreamKey, tag: Tag, len: usize) -> Vec<f64> {
    let mut rng = stream(key, tag);
    (0..len).map(|_| dist.quantile_open(open_unit(rng.next_u64()))).collect()
}

/// `len` uniforms in `(0, 1)`.
pub fn uniform_field(key: StreamKey, tag: Tag, len: usize) -> Vec<f64> {
    let mut rng = stream(key, tag);
    (0..len).map(|_| open_unit(rng.next_u64())).collect()
}

/// The uniform for a single vertex, by random access into the stream.
pub fn uniform_at(key: StreamKey, tag: Tag, v: usize) -> f64 {
    let mut rng = stream(key, tag);
    rng.set_word_pos(2 * v as u128);
    open_unit(rng.next_u64())
}

/// Derives an unrelated 64-bit seed from `(seed, salt)` with SplitMix64.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
