//! Nelder-Mead simplex minimiser.
//!
//! Infinite costs are allowed and simply lose every comparison, so callers
//! can map infeasible points to `f64::INFINITY`.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop once `max(cost) - min(cost)` over the simplex falls below this.
    pub cost_spread: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iters: 5000,
            cost_spread: 1e-8,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub best: Vec<f64>,
    pub best_cost: f64,
    /// Final cost spread across the simplex (infinite if any vertex is infeasible).
    pub spread: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimises `cost` from an axis-aligned initial simplex around `start`.
pub fn minimize<F>(cost: F, start: &[f64], step: f64, opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let c = cost(x);
        if c.is_nan() {
            f64::INFINITY
        } else {
            c
        }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    points.push(start.to_vec());
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step;
        points.push(p);
    }
    let mut costs: Vec<f64> = points.iter().map(|p| eval(p)).collect();
    let mut order: Vec<usize> = (0..=dim).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    loop {
        // stable sort keeps the result deterministic on equal costs
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];
        let spread = costs[worst] - costs[best];
        if spread < opts.cost_spread {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&points[i]) {
                *c += x / dim as f64;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, x)| c + t * (c - x))
                .collect()
        };

        let reflected = along(opts.reflection, &points[worst]);
        let reflected_cost = eval(&reflected);
        if reflected_cost < costs[best] {
            let expanded = along(opts.reflection * opts.expansion, &points[worst]);
            let expanded_cost = eval(&expanded);
            if expanded_cost < reflected_cost {
                points[worst] = expanded;
                costs[worst] = expanded_cost;
            } else {
                points[worst] = reflected;
                costs[worst] = reflected_cost;
            }
            continue;
        }
        if reflected_cost < costs[second_worst] {
            points[worst] = reflected;
            costs[worst] = reflected_cost;
            continue;
        }
        // contraction: outside if the reflection beat the worst point, inside otherwise
        let (candidate, threshold) = if reflected_cost < costs[worst] {
            (along(opts.reflection * opts.contraction, &points[worst]), reflected_cost)
        } else {
            (along(-opts.contraction, &points[worst]), costs[worst])
        };
        let candidate_cost = eval(&candidate);
        if candidate_cost <= threshold {
            points[worst] = candidate;
            costs[worst] = candidate_cost;
            continue;
        }
        let anchor = points[best].clone();
        for &i in &order[1..] {
            for (x, a) in points[i].iter_mut().zip(&anchor) {
                *x = a + opts.shrink * (*x - a);
            }
            costs[i] = eval(&points[i]);
        }
    }

    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
    let best = order[0];
    NelderMeadResult {
        best: points[best].clone(),
        best_cost: costs[best],
        spread: costs[order[dim]] - costs[best],
        iterations,
        evaluations,
        converged,
    }
}
