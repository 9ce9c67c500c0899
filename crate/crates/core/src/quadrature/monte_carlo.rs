//! Seeded Monte Carlo volume estimates.
//!
//! Samples are split into fixed-size chunks; chunk `c` draws from a
//! ChaCha12 generator keyed by `seed` on stream `c`. Hit counts are integers,
//! so the merged estimate does not depend on how chunks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Samples drawn from one generator stream.
pub const CHUNK_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Estimates the volume of `{x in box : inside(x)}` by uniform sampling.
pub fn monte_carlo_volume<P>(inside: P, bbox: &[(f64, f64)], samples: u64, seed: u64) -> Result<McEstimate>
where
    P: Fn(&[f64]) -> bool + Sync,
{
    if samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    if bbox.is_empty() || bbox.iter().any(|&(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::Domain(format!("bounding box {bbox:?} has no volume")));
    }
    let volume: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_SAMPLES.min(samples - c * CHUNK_SAMPLES);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut x = vec![0.0; bbox.len()];
            let mut hits = 0u64;
            for _ in 0..count {
                for (xi, &(lo, hi)) in x.iter_mut().zip(bbox) {
                    *xi = lo + (hi - lo) * rng.random::<f64>();
                }
                if inside(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate { estimate: volume * p, stderr: volume * (p * (1.0 - p) / samples as f64).sqrt(), hits, samples })
}
