use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for sample `index` under `base`.
///
/// SplitMix64 finalizer applied to `base ^ index·γ`. Depends only on the
/// pair, never on which thread draws the sample or when.
pub fn derive_task_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for sample `index`.
pub fn task_rng(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_task_seed(base, index))
}
