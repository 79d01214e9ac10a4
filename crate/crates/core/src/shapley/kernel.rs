use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;
use rand::Rng as _;

use super::{check_inputs, coalition_values, endpoints, ExplainMode, ExplainerConfig, Predict, Result, ShapError, ShapVector};
use crate::rng;

/// Largest M for which exhaustive coalition enumeration is allowed.
pub const KERNEL_EXACT_MAX_FEATURES: usize = 16;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Shapley kernel weight of a coalition of `size` out of `m` features.
/// Infinite at the empty and full coalitions, which are handled as constraints.
pub fn kernel_weight(m: usize, size: usize) -> f64 {
    if size == 0 || size == m {
        return f64::INFINITY;
    }
    (m - 1) as f64 / (binomial(m, size) * size as f64 * (m - size) as f64)
}

/// Kernel SHAP attributions of `instance` against `background`.
///
/// The empty and full coalitions are imposed exactly: `base` is the mean
/// background prediction, and `φ_M` is eliminated through
/// `Σφ = f(x) − base`, leaving an (M−1)-dimensional weighted least-squares
/// problem over the proper coalitions.
pub fn kernel_shap<P: Predict + ?Sized>(
    model: &P,
    instance: &[f64],
    background: ArrayView2<'_, f64>,
    cfg: &ExplainerConfig,
) -> Result<ShapVector> {
    check_inputs(instance, background)?;
    let m = instance.len();
    cfg.validate(m)?;
    let (fx, base) = endpoints(model, instance, background);
    let delta = fx - base;
    if m == 1 {
        return ShapVector { values: vec![delta], base_value: base, instance_output: fx }.checked();
    }

    let n_proper = (1usize << m.min(63)) - 2;
    let exhaustive = cfg.mode == ExplainMode::ExactEnumeration || cfg.coalition_budget >= n_proper;
    let (masks, weights) = if exhaustive { enumerate(m) } else { sample(m, cfg.coalition_budget, cfg.seed) };
    let values = coalition_values(model, instance, background, &masks);

    // Rows (z_i − z_M) for i < M, target v − base − z_M·Δ.
    let k = m - 1;
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    let mut a = vec![0.0; k];
    for ((mask, &w), &v) in masks.iter().zip(&weights).zip(&values) {
        let zm = mask[k] as u8 as f64;
        for i in 0..k {
            a[i] = mask[i] as u8 as f64 - zm;
        }
        let t = v - base - zm * delta;
        for i in 0..k {
            if a[i] == 0.0 {
                continue;
            }
            rhs[i] += w * a[i] * t;
            for j in 0..k {
                gram[(i, j)] += w * a[i] * a[j];
            }
        }
    }
    let phi = solve(gram, rhs, cfg.ridge_epsilon)?;
    let mut out: Vec<f64> = phi.iter().copied().collect();
    out.push(delta - out.iter().sum::<f64>());
    ShapVector { values: out, base_value: base, instance_output: fx }.checked()
}

/// Solves the normal equations by Cholesky; on a singular or badly
/// conditioned system, retries once with `ridge` on the diagonal.
fn solve(gram: DMatrix<f64>, rhs: DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    if let Some(x) = try_cholesky(gram.clone(), &rhs) {
        return Ok(x);
    }
    if ridge > 0.0 {
        let k = gram.nrows();
        let ridged = gram + DMatrix::<f64>::identity(k, k) * ridge;
        if let Some(x) = try_cholesky(ridged, &rhs) {
            tracing::debug!(ridge, "kernel SHAP system was singular; solved with ridge");
            return Ok(x);
        }
    }
    Err(ShapError::Singular { ridge })
}

fn try_cholesky(gram: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = gram.cholesky()?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d.abs()), hi.max(d.abs())));
    // Squared ratio of Cholesky pivots approximates the reciprocal condition number.
    if !(lo > 0.0) || (lo / hi).powi(2) < 1e-12 {
        return None;
    }
    Some(chol.solve(rhs))
}

/// Every proper coalition, weighted by the Shapley kernel.
fn enumerate(m: usize) -> (Vec<Vec<bool>>, Vec<f64>) {
    let total = 1usize << m;
    let mut masks = Vec::with_capacity(total - 2);
    let mut weights = Vec::with_capacity(total - 2);
    for bits in 1..total - 1 {
        let mask: Vec<bool> = (0..m).map(|j| bits >> j & 1 == 1).collect();
        weights.push(kernel_weight(m, bits.count_ones() as usize));
        masks.push(mask);
    }
    (masks, weights)
}

/// `budget / 2` complementary pairs. Sizes are drawn with probability
/// proportional to the kernel mass `C(M,s)·π(s) = (M−1)/(s(M−s))`, subsets
/// uniformly within a size, so each draw carries equal weight.
fn sample(m: usize, budget: usize, seed: u64) -> (Vec<Vec<bool>>, Vec<f64>) {
    let mut r = rng::seeded(seed);
    let mass: Vec<f64> = (1..m).map(|s| 1.0 / (s * (m - s)) as f64).collect();
    let total: f64 = mass.iter().sum();
    let pairs = budget / 2;
    let mut masks = Vec::with_capacity(2 * pairs);
    let mut order: Vec<usize> = (0..m).collect();
    for _ in 0..pairs {
        let mut u = r.random::<f64>() * total;
        let mut size = m - 1;
        for (i, &w) in mass.iter().enumerate() {
            if u < w {
                size = i + 1;
                break;
            }
            u -= w;
        }
        // Partial Fisher-Yates picks a uniform subset of `size` features.
        for i in 0..size {
            let j = r.random_range(i..m);
            order.swap(i, j);
        }
        let mut mask = vec![false; m];
        for &j in &order[..size] {
            mask[j] = true;
        }
        let complement = mask.iter().map(|b| !b).collect();
        masks.push(mask);
        masks.push(complement);
    }
    let weights = vec![1.0; masks.len()];
    (masks, weights)
}
