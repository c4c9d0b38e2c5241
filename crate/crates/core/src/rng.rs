use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded sub-stream. Each generation step draws from its own stream so that
/// changing one step never shifts the randomness of another.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) mod streams {
    pub const WALK: u64 = 1;
    pub const TARGET: u64 = 2;
    pub const LAYOUT: u64 = 3;
    pub const IMAGES: u64 = 4;
    pub const STARTS: u64 = 5;
    pub const EPISODE: u64 = 16;
    pub const AGENT_A: u64 = 17;
    pub const AGENT_B: u64 = 18;
}

/// Mixes a batch seed and an episode index into an independent episode seed.
pub fn derive_seed(batch_seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = batch_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
