use crate::error::{Result, TonalError};
use crate::key_estimation::TonalCenter;
use crate::pitch_space::{LofDistribution, LofIndex, LOF_SIZE};

use super::{TdmParams, STEP_OFFSETS};

/// Poisson tail mass left out by the truncation.
pub const TAIL_MASS: f64 = 1e-10;
/// Hard cap on walk length.
pub const MAX_STEPS: usize = 200;
/// Per-cell floor applied before renormalisation.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Below this in-window mass the model is considered to have diffused away.
pub const MIN_WINDOW_MASS: f64 = 1e-6;

const MAX_STEP: usize = 4;

/// Model probabilities over the 35 window positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDistribution {
    pub probs: [f64; LOF_SIZE],
    /// Walk mass that ended inside the window, before flooring and renormalisation.
    pub in_window_mass: f64,
    /// Largest walk length summed over.
    pub truncation: usize,
}

/// Poisson probabilities `P(n; λ)` for `n = 0..=N`, with `N` the smallest
/// length whose upper tail drops below [`TAIL_MASS`].
pub fn poisson_truncation(lambda: f64) -> Result<Vec<f64>> {
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut pmf = vec![p];
    while 1.0 - cdf >= TAIL_MASS {
        let n = pmf.len();
        if n > MAX_STEPS {
            return Err(TonalError::DiffusionOverflow {
                in_window_mass: cdf,
            });
        }
        p *= lambda / n as f64;
        cdf += p;
        pmf.push(p);
    }
    Ok(pmf)
}

/// Raw (unfloored, unnormalised) probability of ending at each window
/// position, summing walks of length `0..poisson.len()` with the given
/// Poisson weights. Walks may leave and re-enter the window; only the end
/// point is observed.
pub fn window_masses(weights: &[f64; 6], center: LofIndex, poisson: &[f64]) -> [f64; LOF_SIZE] {
    let n_max = poisson.len().saturating_sub(1);
    let pad = MAX_STEP * n_max;
    let width = LOF_SIZE + 2 * pad;
    let mut cur = vec![0.0; width];
    let mut next = vec![0.0; width];
    let start = center.value() + pad;
    cur[start] = 1.0;

    let mut out = [0.0; LOF_SIZE];
    let (mut lo, mut hi) = (start, start);
    for (n, &pn) in poisson.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate() {
            *o += pn * cur[i + pad];
        }
        if n == n_max {
            break;
        }
        // cells further than 4 * (remaining steps) from the window can never
        // come back, so they are not propagated
        let remaining = n_max - n - 1;
        let keep_lo = pad - MAX_STEP * remaining;
        let keep_hi = pad + LOF_SIZE - 1 + MAX_STEP * remaining;
        let new_lo = lo.saturating_sub(MAX_STEP).max(keep_lo);
        let new_hi = (hi + MAX_STEP).min(keep_hi);
        next[new_lo..=new_hi].iter_mut().for_each(|v| *v = 0.0);
        for x in lo..=hi {
            let m = cur[x];
            if m == 0.0 {
                continue;
            }
            for (off, w) in STEP_OFFSETS.iter().zip(weights) {
                let y = (x as i64 + off) as usize;
                if (new_lo..=new_hi).contains(&y) {
                    next[y] += m * w;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        lo = new_lo;
        hi = new_hi;
    }
    out
}

/// Probability of each window position under the model, started at the
/// tonal centre. Mass outside the window is discarded, each cell is floored
/// at [`PROBABILITY_FLOOR`], and the result is renormalised.
pub fn forward_distribution(params: &TdmParams, center: &TonalCenter) -> Result<ModelDistribution> {
    let poisson = poisson_truncation(params.lambda)?;
    let raw = window_masses(&params.weights, center.lof_index, &poisson);
    let in_window_mass: f64 = raw.iter().sum();
    if !(in_window_mass >= MIN_WINDOW_MASS) {
        return Err(TonalError::DiffusionOverflow { in_window_mass });
    }
    let floored = raw.map(|p| p.max(PROBABILITY_FLOOR));
    let total: f64 = floored.iter().sum();
    Ok(ModelDistribution {
        probs: floored.map(|p| p / total),
        in_window_mass,
        truncation: poisson.len() - 1,
    })
}

/// `Σ d_i log P(i)` under the floored, renormalised model.
pub fn log_likelihood(d: &LofDistribution, params: &TdmParams, center: &TonalCenter) -> Result<f64> {
    let model = forward_distribution(params, center)?;
    Ok(log_likelihood_of(d, &model))
}

pub(crate) fn log_likelihood_of(d: &LofDistribution, model: &ModelDistribution) -> f64 {
    d.weights()
        .iter()
        .zip(model.probs.iter())
        .filter(|(di, _)| **di > 0.0)
        .map(|(di, p)| di * p.ln())
        .sum()
}
