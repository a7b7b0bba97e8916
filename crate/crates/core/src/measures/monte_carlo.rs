use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::spec::MeasureSpec;
use super::MeasureError;
use crate::scalar::Probability;

/// Trials per independently seeded block.
pub const BLOCK_SIZE: u64 = 4096;

/// Standard normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkEstimate {
    pub steps: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl WalkEstimate {
    /// Wilson score interval at normal quantile `z`.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.hits, self.trials, z)
    }

    /// Binomial standard error at the point estimate.
    pub fn standard_error(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of `trials` independent `n`-step walks that end at the
/// identity. Block `b` of [`BLOCK_SIZE`] trials draws from ChaCha8 stream
/// `b` under `seed`, so the result does not depend on the thread count.
pub fn mc_return_probability<P: Probability>(
    spec: &MeasureSpec<P>,
    steps: usize,
    trials: u64,
    seed: u64,
) -> Result<WalkEstimate, MeasureError> {
    if trials == 0 {
        return Err(MeasureError::InvalidParameter(
            "at least one trial is needed".to_string(),
        ));
    }
    let group = spec.group();
    let structure = group.structure();
    let elements: Vec<_> = spec.atoms().iter().map(|a| &a.element).collect();
    let sampler = WeightedIndex::new(spec.atoms().iter().map(|a| a.weight.to_f64()))
        .map_err(|e| MeasureError::InvalidWeight(e.to_string()))?;
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let size = BLOCK_SIZE.min(trials - block * BLOCK_SIZE);
            let mut hits = 0u64;
            for _ in 0..size {
                let mut position = group.identity();
                for _ in 0..steps {
                    structure.multiply_assign(&mut position, elements[sampler.sample(&mut rng)]);
                }
                hits += u64::from(group.is_identity(&position));
            }
            hits
        })
        .sum();
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z_95);
    Ok(WalkEstimate {
        steps,
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        ci_low,
        ci_high,
        seed,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, MeasureError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| MeasureError::InvalidParameter(e.to_string()))?;
    Ok(pool.install(f))
}
