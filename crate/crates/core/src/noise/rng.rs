//! Seeded, stream-addressable random numbers.
//!
//! Every image gets its own ChaCha20 stream derived from the global seed and
//! a stable hash of its scene id, so results do not depend on which worker
//! processes a scene or in what order.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Identifier of an independent random stream under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StreamId(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl StreamId {
    /// Stable across platforms and releases: FNV-1a over the UTF-8 bytes,
    /// finalized with splitmix64.
    pub fn for_scene(scene_id: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in scene_id.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        StreamId(splitmix64(h))
    }

    /// Derived sub-stream, e.g. one per frame or per purpose.
    pub fn child(self, index: u64) -> Self {
        StreamId(splitmix64(self.0 ^ splitmix64(index.wrapping_add(1))))
    }
}

impl fmt::Display for StreamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Random source for one `(seed, stream)` pair.
#[derive(Debug, Clone)]
pub struct NoiseRng {
    seed: u64,
    stream: StreamId,
    inner: ChaCha20Rng,
}

impl NoiseRng {
    pub fn new(seed: u64, stream: StreamId) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream.0);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> StreamId {
        self.stream
    }

    /// 32-bit words consumed so far.
    pub fn words_used(&self) -> u128 {
        self.inner.get_word_pos()
    }
}

impl RngCore for NoiseRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
