//! Synthetic chip-response generation.
//!
//! Measured chip leakage responses are not publicly available, so trials use
//! random exponential-decay FIR channels: tap `k` is `decay^k` times an
//! independent unit circular Gaussian draw, with the tap vector normalized to
//! unit energy.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::signal::ChipChannel;

/// Draw a unit-energy random channel with exponential tap-energy decay.
/// Deterministic per `(len, decay, seed)`.
pub fn random_channel(len: usize, decay: f64, seed: u64) -> Result<ChipChannel> {
    if len == 0 {
        return Err(Error::InvalidArgument("channel length must be >= 1".into()));
    }
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "decay must lie in (0, 1], got {decay}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taps: Vec<Complex64> = (0..len)
        .map(|k| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2) * decay.powi(k as i32)
        })
        .collect();
    let energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
    if energy == 0.0 {
        // probability-zero draw; retry deterministically on the next stream
        return random_channel(len, decay, seed.wrapping_add(0x5851_F42D_4C95_7F2D));
    }
    let scale = energy.sqrt().recip();
    for t in &mut taps {
        *t *= scale;
    }
    ChipChannel::new(taps)
}
