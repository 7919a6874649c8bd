use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Number of `1` outcomes in `shots` terminal measurements of a wire whose
/// exact probability of `1` is `p1`. Deterministic for a given seed.
pub fn sample_shots(p1: f64, shots: u64, seed: u64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::invalid(format!("probability {p1} outside [0, 1]")));
    }
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let dist = Binomial::new(shots, p1).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(dist.sample(&mut rng))
}

/// Shot-based estimate `count / shots`.
pub fn sampled_probability(p1: f64, shots: u64, seed: u64) -> Result<f64> {
    Ok(sample_shots(p1, shots, seed)? as f64 / shots as f64)
}
