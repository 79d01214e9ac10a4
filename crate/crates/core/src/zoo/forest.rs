use ndarray::ArrayView2;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, Tree, TreeParams};
use crate::rng;

/// Bagged CART classifiers; the probability is the mean leaf frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

#[derive(Debug, Clone)]
pub(crate) struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub max_features: usize,
    pub bootstrap: bool,
}

impl Forest {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[f64], p: &ForestParams, seed: u64) -> Self {
        let n = x.nrows();
        let tree_params = TreeParams {
            criterion: Criterion::Gini,
            max_depth: p.max_depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: p.max_features,
        };
        // Each tree owns a derived stream, so the result ignores thread scheduling.
        let trees = (0..p.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut r = rng::seeded(rng::derive_seed(seed, t as u64));
                let mut weights = vec![0.0; n];
                if p.bootstrap {
                    for _ in 0..n {
                        weights[r.random_range(0..n)] += 1.0;
                    }
                } else {
                    weights.fill(1.0);
                }
                let samples = (0..n).filter(|&i| weights[i] > 0.0).collect();
                grow(x, y, &weights, samples, &tree_params, Some(&mut r))
            })
            .collect();
        Self { trees }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }
}

/// Candidate features per split for a `max_features` setting.
pub(crate) fn max_features(setting: &str, m: usize) -> usize {
    let k = match setting {
        "sqrt" => (m as f64).sqrt().floor() as usize,
        "log2" => (m as f64).log2().floor() as usize,
        _ => m,
    };
    k.clamp(1, m.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn feature_counts() {
        assert_eq!(max_features("sqrt", 3), 1);
        assert_eq!(max_features("sqrt", 16), 4);
        assert_eq!(max_features("log2", 1), 1);
        assert_eq!(max_features("all", 5), 5);
    }

    #[test]
    fn deterministic_per_seed() {
        let x = Array2::from_shape_fn((60, 3), |(i, j)| ((i * 7 + j * 13) % 17) as f64);
        let y: Vec<f64> = (0..60).map(|i| ((i * 7) % 17 > 8) as u8 as f64).collect();
        let p = ForestParams { n_trees: 10, max_depth: None, max_features: 1, bootstrap: true };
        assert_eq!(Forest::fit(x.view(), &y, &p, 5), Forest::fit(x.view(), &y, &p, 5));
        assert_ne!(Forest::fit(x.view(), &y, &p, 5), Forest::fit(x.view(), &y, &p, 6));
    }
}
