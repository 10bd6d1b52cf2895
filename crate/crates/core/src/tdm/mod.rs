//! Tonal diffusion model: pitches are reached from the tonal centre by random
//! walks on the line of fifths whose length is Poisson(λ) and whose steps are
//! fifths (±1) or thirds (±3, ±4).

mod fit;
mod forward;
mod sampler;
pub mod simplex;

pub use fit::{fit, fit_with_options, FitOptions, TdmFit, IDENTIFIABILITY_LAMBDA};
pub use forward::{
    forward_distribution, log_likelihood, poisson_truncation, window_masses, ModelDistribution,
    MAX_STEPS, MIN_WINDOW_MASS, PROBABILITY_FLOOR, TAIL_MASS,
};
pub use sampler::{sample_distribution, sample_tokens};

use serde::Serialize;

use crate::error::{Result, TonalError};

/// One of the six walk steps, as a line-of-fifths displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalStep(i8);

impl IntervalStep {
    /// Weight-vector order: `[-4, -3, -1, +1, +3, +4]`.
    pub const ALL: [IntervalStep; 6] = [
        IntervalStep(-4),
        IntervalStep(-3),
        IntervalStep(-1),
        IntervalStep(1),
        IntervalStep(3),
        IntervalStep(4),
    ];

    pub fn new(offset: i8) -> Result<Self> {
        match offset {
            -4 | -3 | -1 | 1 | 3 | 4 => Ok(IntervalStep(offset)),
            _ => Err(TonalError::InvalidParams(format!(
                "{offset} is not a walk step"
            ))),
        }
    }

    pub fn offset(self) -> i64 {
        self.0 as i64
    }

    pub fn is_fifth(self) -> bool {
        self.0.abs() == 1
    }
}

/// Offsets matching the weight order.
pub const STEP_OFFSETS: [i64; 6] = [-4, -3, -1, 1, 3, 4];

pub const UNIFORM_WEIGHTS: [f64; 6] = [1.0 / 6.0; 6];
pub const FIFTH_HEAVY_WEIGHTS: [f64; 6] = [0.05, 0.05, 0.4, 0.4, 0.05, 0.05];

/// Poisson mean path length and interval weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdmParams {
    pub lambda: f64,
    /// Ordered as [`IntervalStep::ALL`].
    pub weights: [f64; 6],
}

impl TdmParams {
    pub fn new(lambda: f64, weights: [f64; 6]) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(TonalError::InvalidParams(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(TonalError::InvalidParams(
                "weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(TonalError::InvalidParams(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(TdmParams { lambda, weights })
    }

    /// Rescales non-negative weights onto the simplex.
    pub fn normalized(lambda: f64, weights: [f64; 6]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(TonalError::DegenerateWeights);
        }
        TdmParams::new(lambda, weights.map(|w| w / sum))
    }

    /// Weights with every step reversed (w_j <-> w_-j).
    pub fn mirrored(&self) -> Self {
        let mut weights = self.weights;
        weights.reverse();
        TdmParams {
            lambda: self.lambda,
            weights,
        }
    }
}
