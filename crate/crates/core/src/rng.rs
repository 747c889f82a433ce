//! Seeded random streams.
//!
//! Draws are organised in blocks of [`BLOCK_SIZE`]. Block `i` of a run with
//! root seed `s` reads ChaCha8 keyed by `s` on stream `i`, so its content
//! depends only on `(s, i)`. Workers can take blocks in any order and the
//! merged output is the same for every worker count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Number of draws generated from one substream.
pub const BLOCK_SIZE: usize = 4096;

/// Independent substream `index` of the root seed.
pub fn substream(root_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval `(0, 1)`; one `u64` per call.
///
/// Midpoints of a 2^-52 grid: `k + 0.5` is exact for `k < 2^52`, so the
/// result never rounds onto 0 or 1.
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Fair coin; one `u64` per call.
pub fn coin<R: RngCore + ?Sized>(rng: &mut R) -> bool {
    rng.next_u64() >> 63 == 1
}

/// Standard normal by inverting the CDF of one open uniform, so each
/// variate consumes exactly one `u64`.
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    std_normal_quantile(uniform_open(rng))
}

pub fn std_normal_quantile(p: f64) -> f64 {
    thread_local! {
        static N01: Normal = Normal::new(0.0, 1.0).expect("unit normal");
    }
    N01.with(|n| n.inverse_cdf(p))
}
