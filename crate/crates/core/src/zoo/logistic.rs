use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::gbt::sigmoid;
use crate::rng;

pub(crate) const MAX_ITER: usize = 500;
const TOL: f64 = 1e-6;

/// L2-penalized logistic regression with an unpenalized intercept.
///
/// Minimizes `Σ logloss + l2/2 · ||w||²` by Nesterov-accelerated gradient
/// descent with step `1/L`, where `L` bounds the gradient's Lipschitz constant.
/// Weights start from a seeded `N(0, 1/m)` draw. A converged fit does not
/// depend on it, but directions the data barely constrain (collinear columns)
/// keep their starting values when the iteration cap is hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl Logistic {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[f64], l2: f64, seed: u64) -> Self {
        let (n, m) = x.dim();
        // Work on centered columns; the unpenalized intercept absorbs the shift
        // so the optimum is unchanged while conditioning improves a lot.
        let means: Vec<f64> = (0..m).map(|j| x.column(j).sum() / n as f64).collect();
        let xc = ndarray::Array2::from_shape_fn((n, m), |(i, j)| x[[i, j]] - means[j]);
        let lipschitz = 0.25 * (largest_eigenvalue(&xc).max(n as f64)) + l2;
        let step = 1.0 / lipschitz;

        // Weights then intercept.
        let mut r = rng::seeded(seed);
        let scale = 1.0 / (m.max(1) as f64).sqrt();
        let mut theta: Vec<f64> = (0..m).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect();
        theta.push(0.0);
        let mut prev = theta.clone();
        let mut grad = vec![0.0; m + 1];
        let mut look = vec![0.0; m + 1];
        let mut converged = false;
        let mut iterations = 0;
        let mut t = 1.0f64;
        for it in 0..MAX_ITER {
            iterations = it + 1;
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let momentum = (t - 1.0) / t_next;
            for k in 0..=m {
                look[k] = theta[k] + momentum * (theta[k] - prev[k]);
            }
            gradient(&xc, y, &look, l2, &mut grad);
            prev.copy_from_slice(&theta);
            for k in 0..=m {
                theta[k] = look[k] - step * grad[k];
            }
            t = t_next;
            gradient(&xc, y, &theta, l2, &mut grad);
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm <= TOL * n as f64 {
                converged = true;
                break;
            }
        }
        let weights = theta[..m].to_vec();
        let intercept = theta[m] - weights.iter().zip(&means).map(|(w, mu)| w * mu).sum::<f64>();
        Self { weights, intercept, converged, iterations }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        sigmoid(self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>())
    }
}

fn gradient(x: &ndarray::Array2<f64>, y: &[f64], theta: &[f64], l2: f64, grad: &mut [f64]) {
    let m = x.ncols();
    grad.fill(0.0);
    for (i, row) in x.rows().into_iter().enumerate() {
        let z = theta[m] + row.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>();
        let r = sigmoid(z) - y[i];
        for (g, v) in grad.iter_mut().zip(row.iter()) {
            *g += r * v;
        }
        grad[m] += r;
    }
    for k in 0..m {
        grad[k] += l2 * theta[k];
    }
}

/// Largest eigenvalue of `XᵀX` by power iteration, padded by 1% for safety
/// against an underestimate.
fn largest_eigenvalue(x: &ndarray::Array2<f64>) -> f64 {
    let m = x.ncols();
    if m == 0 {
        return 0.0;
    }
    let gram = x.t().dot(x);
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let w: Vec<f64> = (0..m).map(|i| (0..m).map(|j| gram[[i, j]] * v[j]).sum()).collect();
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        v = w.into_iter().map(|a| a / norm).collect();
        if (next - lambda).abs() <= 1e-10 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda * 1.01
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn power_iteration_on_diagonal() {
        let x = array![[3.0, 0.0], [0.0, 1.0]];
        let l = largest_eigenvalue(&x);
        assert!((l / 1.01 - 9.0).abs() < 1e-8);
    }

    #[test]
    fn converges_on_overlapping_classes() {
        let x = Array2::from_shape_fn((40, 1), |(i, _)| (i % 20) as f64);
        let y: Vec<f64> = (0..40).map(|i| ((i % 20) as f64 + (i / 20) as f64 * 5.0 > 12.0) as u8 as f64).collect();
        let model = Logistic::fit(x.view(), &y, 1.0, 0);
        assert!(model.converged, "{} iterations", model.iterations);
        assert!(model.weights[0] > 0.0);
    }

    #[test]
    fn strong_penalty_flattens_weights() {
        let x = Array2::from_shape_fn((40, 1), |(i, _)| i as f64);
        let y: Vec<f64> = (0..40).map(|i| (i >= 20) as u8 as f64).collect();
        let weak = Logistic::fit(x.view(), &y, 1e-3, 0);
        let strong = Logistic::fit(x.view(), &y, 1e4, 0);
        assert!(strong.weights[0].abs() < weak.weights[0].abs());
    }
}
