use serde::Serialize;

use crate::error::{Result, TonalError};
use crate::key_estimation::TonalCenter;
use crate::pitch_space::LofDistribution;

use super::forward::{forward_distribution, log_likelihood_of};
use super::simplex::{minimize, NelderMeadOptions};
use super::{TdmParams, FIFTH_HEAVY_WEIGHTS, UNIFORM_WEIGHTS};

/// Below this fitted λ the interval weights carry no information.
pub const IDENTIFIABILITY_LAMBDA: f64 = 1e-3;

const START_LAMBDAS: [f64; 5] = [0.25, 1.0, 2.0, 4.0, 8.0];
// exp(7) ≈ 1100 steps on average, far past the overflow limit
const MAX_LOG_LAMBDA: f64 = 7.0;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub simplex: NelderMeadOptions,
    pub initial_step: f64,
    /// Fresh-simplex restarts from the incumbent after the first search.
    pub polish_rounds: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            simplex: NelderMeadOptions::default(),
            initial_step: 0.5,
            polish_rounds: 3,
        }
    }
}

/// Maximum-likelihood parameters and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmFit {
    pub params: TdmParams,
    pub log_likelihood: f64,
    pub n_restarts_used: usize,
    pub converged: bool,
    /// Model mass inside the window before renormalisation.
    pub renormalized_mass: f64,
    /// False when λ* fell below [`IDENTIFIABILITY_LAMBDA`] and the weights
    /// were replaced by the uniform vector.
    pub weights_identifiable: bool,
    pub evaluations: usize,
}

fn decode(x: &[f64]) -> TdmParams {
    let lambda = x[0].min(MAX_LOG_LAMBDA).exp();
    let logits = &x[1..7];
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: [f64; 6] = std::array::from_fn(|j| (logits[j] - top).exp());
    let sum: f64 = exps.iter().sum();
    TdmParams {
        lambda,
        weights: exps.map(|e| e / sum),
    }
}

fn encode(lambda: f64, weights: &[f64; 6]) -> Vec<f64> {
    let mut x = Vec::with_capacity(7);
    x.push(lambda.ln());
    x.extend(weights.iter().map(|w| w.ln()));
    x
}

pub fn fit(d: &LofDistribution, center: &TonalCenter) -> Result<TdmFit> {
    fit_with_options(d, center, &FitOptions::default())
}

/// Maximises the log-likelihood over λ >= 0 and the weight simplex using
/// `λ = exp(a)` and softmax weights, from ten fixed starts.
pub fn fit_with_options(
    d: &LofDistribution,
    center: &TonalCenter,
    opts: &FitOptions,
) -> Result<TdmFit> {
    let cost = |x: &[f64]| -> f64 {
        match forward_distribution(&decode(x), center) {
            Ok(model) => -log_likelihood_of(d, &model),
            Err(_) => f64::INFINITY,
        }
    };

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut restarts_used = 0;
    let mut evaluations = 0;
    for &lambda0 in &START_LAMBDAS {
        for w0 in [&UNIFORM_WEIGHTS, &FIFTH_HEAVY_WEIGHTS] {
            let mut run = minimize(cost, &encode(lambda0, w0), opts.initial_step, &opts.simplex);
            evaluations += run.evaluations;
            let mut step = opts.initial_step;
            for _ in 0..opts.polish_rounds {
                if !run.best_cost.is_finite() {
                    break;
                }
                step *= 0.5;
                let again = minimize(cost, &run.best, step, &opts.simplex);
                evaluations += again.evaluations;
                let gain = run.best_cost - again.best_cost;
                run = if again.best_cost <= run.best_cost { again } else { run };
                if gain < opts.simplex.cost_spread {
                    break;
                }
            }
            if !run.best_cost.is_finite() {
                continue;
            }
            restarts_used += 1;
            if best.as_ref().is_none_or(|(c, _, _)| run.best_cost < *c) {
                best = Some((run.best_cost, run.best, run.converged));
            }
        }
    }

    let (_, x, converged) = best.ok_or(TonalError::FitFailure)?;
    let mut params = decode(&x);
    let weights_identifiable = params.lambda >= IDENTIFIABILITY_LAMBDA;
    if !weights_identifiable {
        params.weights = UNIFORM_WEIGHTS;
    }
    let model = forward_distribution(&params, center)?;
    Ok(TdmFit {
        params,
        log_likelihood: log_likelihood_of(d, &model),
        n_restarts_used: restarts_used,
        converged,
        renormalized_mass: model.in_window_mass,
        weights_identifiable,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::key_estimation::Mode;
    use crate::pitch_space::LofIndex;
    use crate::tdm::log_likelihood;

    fn c_major() -> TonalCenter {
        TonalCenter::annotated(LofIndex::C, Mode::Major)
    }

    #[test]
    fn point_mass_fits_to_zero_lambda() {
        let d = LofDistribution::point_mass(LofIndex::C);
        let f = fit(&d, &c_major()).unwrap();
        assert!(f.params.lambda < 1e-3, "lambda = {}", f.params.lambda);
        assert!(f.log_likelihood.abs() < 1e-3);
        assert!(!f.weights_identifiable);
        assert_eq!(f.params.weights, UNIFORM_WEIGHTS);
        assert_eq!(f.n_restarts_used, 10);
    }

    #[test]
    fn exact_model_distribution_is_recovered() {
        let truth = TdmParams::new(1.5, FIFTH_HEAVY_WEIGHTS).unwrap();
        let model = forward_distribution(&truth, &c_major()).unwrap();
        let d = LofDistribution::from_masses(model.probs).unwrap();
        let f = fit(&d, &c_major()).unwrap();
        assert!((f.params.lambda - 1.5).abs() < 1e-2, "{:?}", f.params);
        for (a, b) in f.params.weights.iter().zip(FIFTH_HEAVY_WEIGHTS) {
            assert!((a - b).abs() < 1e-2, "{:?}", f.params.weights);
        }
        let at_truth = log_likelihood(&d, &truth, &c_major()).unwrap();
        assert!(f.log_likelihood >= at_truth - 1e-7);
        assert!(f.converged);
    }

    #[test]
    fn fit_is_deterministic() {
        let mut m = [0.0; 35];
        m[15] = 0.1;
        m[16] = 0.2;
        m[17] = 0.4;
        m[18] = 0.2;
        m[21] = 0.1;
        let d = LofDistribution::from_masses(m).unwrap();
        let a = fit(&d, &c_major()).unwrap();
        let b = fit(&d, &c_major()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decode_is_on_the_simplex() {
        let p = decode(&[0.3, 1.0, -2.0, 0.0, 5.0, 700.0, -700.0]);
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.weights.iter().all(|w| *w >= 0.0));
        assert!((p.lambda - 0.3f64.exp()).abs() < 1e-15);
    }
}
