use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, Tree, TreeParams};

const P_CLAMP: f64 = 1e-7;

/// Gradient-boosted regression trees on the log-odds with a sigmoid link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees {
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Mean log-loss on the training rows after the last round.
    pub train_loss: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn log_loss(y: &[f64], p: &[f64]) -> f64 {
    let total: f64 = y
        .iter()
        .zip(p)
        .map(|(&y, &p)| {
            let p = p.clamp(P_CLAMP, 1.0 - P_CLAMP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / y.len() as f64
}

impl BoostedTrees {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[f64], n_rounds: usize, learning_rate: f64, max_depth: usize) -> Self {
        let n = x.nrows();
        let prevalence = (y.iter().sum::<f64>() / n as f64).clamp(P_CLAMP, 1.0 - P_CLAMP);
        let init = (prevalence / (1.0 - prevalence)).ln();
        let params = TreeParams {
            criterion: Criterion::Mse,
            max_depth: Some(max_depth),
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: x.ncols(),
        };
        let ones = vec![1.0; n];
        let mut score = vec![init; n];
        let mut residual = vec![0.0; n];
        let mut prob = vec![0.0; n];
        let mut trees = Vec::with_capacity(n_rounds);
        for _ in 0..n_rounds {
            for i in 0..n {
                prob[i] = sigmoid(score[i]);
                residual[i] = y[i] - prob[i];
            }
            let mut tree = grow(x, &residual, &ones, (0..n).collect(), &params, None);
            // Replace mean residuals with one Newton step per leaf.
            let mut num = vec![0.0; tree.nodes.len()];
            let mut den = vec![0.0; tree.nodes.len()];
            let leaves: Vec<usize> = (0..n).map(|i| tree.leaf_of(x.row(i).as_slice().unwrap())).collect();
            for (i, &leaf) in leaves.iter().enumerate() {
                num[leaf] += residual[i];
                den[leaf] += prob[i] * (1.0 - prob[i]);
            }
            for leaf in 0..tree.nodes.len() {
                let step = if den[leaf] > 1e-12 { num[leaf] / den[leaf] } else { 0.0 };
                tree.set_leaf(leaf, step);
            }
            for (i, &leaf) in leaves.iter().enumerate() {
                let step = if den[leaf] > 1e-12 { num[leaf] / den[leaf] } else { 0.0 };
                score[i] += learning_rate * step;
            }
            trees.push(tree);
        }
        for i in 0..n {
            prob[i] = sigmoid(score[i]);
        }
        Self { init, learning_rate, trees, train_loss: log_loss(y, &prob) }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let score = self.init + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>();
        sigmoid(score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0) < 1e-300);
        assert_eq!(sigmoid(800.0), 1.0);
    }

    #[test]
    fn clamped_loss_is_finite() {
        assert!(log_loss(&[1.0, 0.0], &[0.0, 1.0]).is_finite());
    }

    #[test]
    fn loss_decreases_with_rounds() {
        let x = Array2::from_shape_fn((80, 2), |(i, j)| ((i * 31 + j * 17) % 23) as f64);
        let y: Vec<f64> = (0..80).map(|i| (x[[i, 0]] + x[[i, 1]] > 22.0) as u8 as f64).collect();
        let few = BoostedTrees::fit(x.view(), &y, 5, 0.1, 2);
        let many = BoostedTrees::fit(x.view(), &y, 50, 0.1, 2);
        assert!(many.train_loss < few.train_loss);
    }
}
