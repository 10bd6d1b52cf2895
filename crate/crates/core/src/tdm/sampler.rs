use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::error::{Result, TonalError};
use crate::key_estimation::TonalCenter;
use crate::pitch_space::{LofDistribution, LofIndex, LOF_SIZE};

use super::{TdmParams, STEP_OFFSETS};

const PROBE_DRAWS: usize = 10_000;
const MAX_REJECTION_RATE: f64 = 0.99;

/// End points of `n_tokens` independent walks. Walks that end outside the
/// window are redrawn. Deterministic for a given seed.
pub fn sample_tokens(
    params: &TdmParams,
    center: &TonalCenter,
    n_tokens: usize,
    seed: u64,
) -> Result<Vec<LofIndex>> {
    if n_tokens == 0 {
        return Err(TonalError::InvalidParams("n_tokens must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = WeightedIndex::new(params.weights)
        .map_err(|e| TonalError::InvalidParams(format!("weights: {e}")))?;
    let lengths = if params.lambda > 0.0 {
        Some(
            Poisson::new(params.lambda)
                .map_err(|e| TonalError::InvalidParams(format!("lambda: {e}")))?,
        )
    } else {
        None
    };

    let start = center.lof_index.value() as i64;
    let mut tokens = Vec::with_capacity(n_tokens);
    let mut attempts = 0usize;
    while tokens.len() < n_tokens {
        attempts += 1;
        let n = lengths.as_ref().map_or(0, |p| p.sample(&mut rng) as u64);
        let mut pos = start;
        for _ in 0..n {
            pos += STEP_OFFSETS[steps.sample(&mut rng)];
        }
        if (0..LOF_SIZE as i64).contains(&pos) {
            tokens.push(LofIndex::new(pos).expect("checked range"));
        }
        if attempts == PROBE_DRAWS {
            let rejected = (attempts - tokens.len()) as f64 / attempts as f64;
            if rejected > MAX_REJECTION_RATE {
                return Err(TonalError::DiffusionOverflow {
                    in_window_mass: 1.0 - rejected,
                });
            }
        }
    }
    Ok(tokens)
}

/// Empirical distribution of [`sample_tokens`].
pub fn sample_distribution(
    params: &TdmParams,
    center: &TonalCenter,
    n_tokens: usize,
    seed: u64,
) -> Result<LofDistribution> {
    let mut counts = [0.0; LOF_SIZE];
    for t in sample_tokens(params, center, n_tokens, seed)? {
        counts[t.value()] += 1.0;
    }
    LofDistribution::from_masses(counts)
}
