//! Seeded signal and noise generation.
//!
//! All randomness flows through ChaCha8 seeded with explicit 64-bit seeds,
//! so every experiment is reproducible across platforms. Per-trial streams
//! are derived as `seed XOR splitmix64(trial_index)`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::vector::SparseVector;

/// Values this close to zero are rejected when drawing nonzero entries.
pub const ZERO_EXCLUSION: f64 = 0.01;

/// splitmix64 finalizer, used to hash trial indices into subseeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial stream seed.
pub fn subseed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

/// Draws a k-sparse vector: uniform random support, values uniform in
/// `value_range` excluding the `[-0.01, 0.01]` neighborhood of zero.
pub fn gen_sparse(n: usize, k: usize, seed: u64, value_range: (f64, f64)) -> Result<SparseVector> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "sparsity k = {k} exceeds dimension n = {n}"
        )));
    }
    let (lo, hi) = value_range;
    let range_ok = lo.is_finite() && hi.is_finite() && lo < hi;
    if !range_ok {
        return Err(Error::InvalidParameter(format!(
            "empty value range [{lo}, {hi}]"
        )));
    }
    if hi <= ZERO_EXCLUSION && lo >= -ZERO_EXCLUSION {
        return Err(Error::InvalidParameter(
            "value range lies inside the zero-exclusion band".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = sample(&mut rng, n, k).into_vec();
    indices.sort_unstable();
    let mut entries = Vec::with_capacity(k);
    for i in indices {
        let v = loop {
            let v: f64 = rng.gen_range(lo..hi);
            if v.abs() > ZERO_EXCLUSION {
                break v;
            }
        };
        entries.push((i, v));
    }
    Ok(SparseVector { n, entries })
}

/// Shot noise: exactly `corrupted` uniformly chosen positions carry
/// `alpha * N(0, 1)` draws; everything else is zero.
pub fn gen_shot_noise(m: usize, corrupted: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    if corrupted > m {
        return Err(Error::InvalidParameter(format!(
            "cannot corrupt {corrupted} of {m} measurements"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = vec![0.0f64; m];
    for pos in sample(&mut rng, m, corrupted).into_iter() {
        let g: f64 = rng.sample(StandardNormal);
        eta[pos] = alpha * g;
    }
    Ok(eta)
}
