//! Tonal focus, tonal connection and interval-weight summaries.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Result, TonalError};
use crate::key_estimation::TonalCenter;
use crate::pitch_space::{ChromaticDistribution, LofDistribution, LOF_CENTER, LOF_SIZE};
use crate::tdm::TdmFit;

/// Half-width used for the headline focus value.
pub const PRIMARY_FOCUS_K: usize = 3;
pub const MAX_FOCUS_K: usize = LOF_CENTER;
pub const MAX_CHROMATIC_FOCUS_K: usize = 6;

/// Focus values keyed by window half-width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocusProfile {
    pub values: BTreeMap<usize, f64>,
}

impl FocusProfile {
    pub fn compute(
        d: &LofDistribution,
        center: &TonalCenter,
        ks: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let values = ks
            .into_iter()
            .map(|k| tonal_focus(d, center, k).map(|f| (k, f)))
            .collect::<Result<_>>()?;
        Ok(FocusProfile { values })
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(&k).copied()
    }
}

/// Share of the distribution within `k` line-of-fifths positions of the
/// centre. The window is clamped to the 35-position array.
pub fn tonal_focus(d: &LofDistribution, center: &TonalCenter, k: usize) -> Result<f64> {
    if k > MAX_FOCUS_K {
        return Err(TonalError::OutOfRange {
            what: "focus half-width k",
            value: k as i64,
            min: 0,
            max: MAX_FOCUS_K as i64,
        });
    }
    let c = center.lof_index.value();
    let lo = c.saturating_sub(k);
    let hi = (c + k).min(LOF_SIZE - 1);
    let w = d.weights();
    if w.iter().all(|&v| v == 0.0) {
        return Err(TonalError::EmptyInput);
    }
    Ok(w[lo..=hi].iter().sum::<f64>().min(1.0))
}

/// Same window measured on the 12-step circle of fifths after enharmonic
/// collapse. Pitch classes are counted once even when the window wraps.
pub fn chromatic_focus(cd: &ChromaticDistribution, tonic_pc: u8, k: usize) -> Result<f64> {
    if k > MAX_CHROMATIC_FOCUS_K {
        return Err(TonalError::OutOfRange {
            what: "chromatic focus half-width k",
            value: k as i64,
            min: 0,
            max: MAX_CHROMATIC_FOCUS_K as i64,
        });
    }
    let w = cd.weights();
    if w.iter().all(|&v| v == 0.0) {
        return Err(TonalError::EmptyInput);
    }
    let mut in_window = [false; 12];
    for j in -(k as i64)..=(k as i64) {
        in_window[(tonic_pc as i64 + 7 * j).rem_euclid(12) as usize] = true;
    }
    Ok(w.iter()
        .zip(in_window)
        .filter(|(_, inside)| *inside)
        .map(|(v, _)| v)
        .sum::<f64>()
        .min(1.0))
}

/// The fitted λ, paired with whether the fit converged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TonalConnection {
    pub value: f64,
    pub converged: bool,
}

pub fn tonal_connection(fit: &TdmFit) -> TonalConnection {
    TonalConnection {
        value: fit.params.lambda,
        converged: fit.converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightStats {
    pub fifth_dominance: f64,
    /// Shannon entropy in nats.
    pub weight_entropy: f64,
    /// Fisher excess kurtosis from population moments; `None` for a
    /// (near-)constant vector.
    pub weight_kurtosis: Option<f64>,
}

const KURTOSIS_MIN_VARIANCE: f64 = 1e-15;

pub fn weight_stats(w: &[f64; 6]) -> Result<WeightStats> {
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(TonalError::InvalidParams(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(TonalError::DegenerateWeights);
    }
    // indices 2 and 3 are the -1/+1 fifth steps
    let fifth_dominance = (w[2] + w[3]) / total;
    let weight_entropy = -w
        .iter()
        .map(|v| v / total)
        .filter(|p| *p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>();
    Ok(WeightStats {
        fifth_dominance,
        weight_entropy,
        weight_kurtosis: excess_kurtosis(w),
    })
}

/// `m4 / m2^2 - 3` over the raw values.
pub fn excess_kurtosis(values: &[f64]) -> Option<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 < KURTOSIS_MIN_VARIANCE {
        return None;
    }
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    Some(m4 / (m2 * m2) - 3.0)
}
