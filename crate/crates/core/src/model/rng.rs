use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Field = 1,
    Noise = 2,
}

/// Master seed from which independent, counter-based substreams are derived.
///
/// A substream is the ChaCha20 keystream selected by `(replicate, role,
/// scale)`, so the draws never depend on evaluation order or thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Substream for `(replicate, role, scale)`. `scale` is taken modulo 2^24.
    pub fn stream(&self, replicate: u32, role: StreamRole, scale: u32) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        let id = (u64::from(replicate) << 32) | ((role as u64) << 24) | u64::from(scale & 0xFF_FFFF);
        rng.set_stream(id);
        rng
    }
}
