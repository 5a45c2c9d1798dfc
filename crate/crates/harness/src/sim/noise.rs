//! Seeded, per-channel independent random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream identifiers. Each consumer draws from its own ChaCha stream so
/// adding a fault or wind component never shifts the noise sequences.
pub mod stream {
    /// Measurement noise of channel `i` (0..=2 AOA, 3..=5 VCAS, 6 Vz).
    pub const fn measurement(i: usize) -> u64 {
        i as u64
    }
    pub const WIND_X: u64 = 100;
    pub const WIND_Z: u64 = 101;
    /// NRZ switching times of fault `i`.
    pub const fn fault(i: usize) -> u64 {
        1_000 + i as u64
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard-deviation-scaled Gaussian samples.
pub fn gaussian(rng: &mut ChaCha8Rng, std: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    std * z
}
