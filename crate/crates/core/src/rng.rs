//! Deterministic random streams.
//!
//! Every random draw in the simulator comes from a [`ChaCha8Rng`] whose key is
//! derived from the master seed and a short tag path such as
//! `(purpose, round, device)`. Streams never share state, so the work can be
//! split across threads in any order and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Top-level tag separating independent uses of randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Dataset = 1,
    Split = 2,
    Batch = 3,
    Channel = 4,
    Csi = 5,
    Noise = 6,
    Verify = 7,
    Power = 8,
    NoiseProfile = 9,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream keyed by `(seed, purpose, tags...)`.
pub fn stream(seed: u64, purpose: Purpose, tags: &[u64]) -> StreamRng {
    let mut h = splitmix64(seed ^ 0x6F62_6461_5F73_6565);
    h = splitmix64(h ^ purpose as u64);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t));
    }
    let mut key = [0u8; 32];
    let mut lane = h;
    for chunk in key.chunks_exact_mut(8) {
        lane = splitmix64(lane);
        chunk.copy_from_slice(&lane.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
