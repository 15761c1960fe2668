use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded, splittable random stream.
///
/// Backed by ChaCha8 (`rand_chacha`): the 64-bit seed is expanded into the
/// 256-bit key with `SeedableRng::seed_from_u64`, and `stream_id` selects one
/// of the 2^64 independent ChaCha streams under that key. ChaCha output is
/// defined byte-for-byte, so a given `(seed, stream_id)` produces the same
/// sequence on every platform.
///
/// `split(k)` keeps the key and moves to stream `mix(stream_id, k)`, where
/// `mix` is the SplitMix64 finalizer applied to the parent id combined with
/// `k`. Splitting never advances the parent.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream number `k`. Deterministic in `(seed, stream_id, k)`.
    pub fn split(&self, k: u64) -> RngStream {
        let child = splitmix64(self.stream_id ^ splitmix64(k.wrapping_mul(GOLDEN) ^ 0x5EED));
        RngStream::with_stream(self.seed, child)
    }

    /// Uniform draw from the open interval (0, 1) with 53 bits of resolution.
    pub fn uniform_open01(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.rng.gen_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
