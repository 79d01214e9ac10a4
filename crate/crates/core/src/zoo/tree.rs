//! CART trees shared by the single tree, the forest and the booster.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Gini,
    Entropy,
    /// Squared error, for the booster's regression trees.
    Mse,
}

impl Criterion {
    /// Node impurity from weighted sums `w = Σw`, `s = Σwy`, `q = Σwy²`.
    fn impurity(self, w: f64, s: f64, q: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let mean = s / w;
        match self {
            Criterion::Gini => 2.0 * mean * (1.0 - mean),
            Criterion::Entropy => {
                let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
                h(mean) + h(1.0 - mean)
            }
            Criterion::Mse => (q / w - mean * mean).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

/// A fitted binary tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf_of(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
                TreeNode::Leaf { .. } => return i,
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_of(row)] {
            TreeNode::Leaf { value } => value,
            TreeNode::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            best = best.max(d);
            if let TreeNode::Split { left, right, .. } = self.nodes[i] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    pub(crate) fn set_leaf(&mut self, node: usize, value: f64) {
        if let TreeNode::Leaf { value: v } = &mut self.nodes[node] {
            *v = value;
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TreeParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features examined per split; fewer than the column count needs an rng.
    pub max_features: usize,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
    n_left: usize,
}

/// Grows a tree on the rows listed in `samples`, each weighted by
/// `weights[row]`. Leaves hold the weighted mean of `y`.
pub(crate) fn grow(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    weights: &[f64],
    samples: Vec<usize>,
    params: &TreeParams,
    mut rng: Option<&mut Rng>,
) -> Tree {
    let m = x.ncols();
    let mut nodes = vec![TreeNode::Leaf { value: 0.0 }];
    let mut stack = vec![(0usize, samples, 0usize)];
    let mut features: Vec<usize> = (0..m).collect();
    let mut order: Vec<(f64, usize)> = Vec::new();

    while let Some((node, rows, depth)) = stack.pop() {
        let (w, s, q) = sums(&rows, y, weights);
        let impurity = params.criterion.impurity(w, s, q);
        let value = if w > 0.0 { s / w } else { 0.0 };
        nodes[node] = TreeNode::Leaf { value };

        let n = rows.len();
        if impurity <= 1e-12
            || params.max_depth.is_some_and(|d| depth >= d)
            || n < params.min_samples_split
            || n < 2 * params.min_samples_leaf
        {
            continue;
        }

        features.clear();
        features.extend(0..m);
        if params.max_features < m {
            let rng = rng.as_deref_mut().expect("feature subsampling needs an rng");
            features.shuffle(rng);
        }

        let mut best: Option<Best> = None;
        for (visited, &feature) in features.iter().enumerate() {
            // Past the quota, keep looking only while nothing splittable was found.
            if visited >= params.max_features && best.is_some() {
                break;
            }
            order.clear();
            order.extend(rows.iter().map(|&r| (x[[r, feature]], r)));
            order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if order[0].0 == order[n - 1].0 {
                continue;
            }
            let (mut wl, mut sl, mut ql) = (0.0, 0.0, 0.0);
            for i in 0..n - 1 {
                let (xi, r) = order[i];
                let (wr, yr) = (weights[r], y[r]);
                wl += wr;
                sl += wr * yr;
                ql += wr * yr * yr;
                let n_left = i + 1;
                let next = order[i + 1].0;
                if xi == next || n_left < params.min_samples_leaf || n - n_left < params.min_samples_leaf {
                    continue;
                }
                let child = wl * params.criterion.impurity(wl, sl, ql)
                    + (w - wl) * params.criterion.impurity(w - wl, s - sl, q - ql);
                let gain = w * impurity - child;
                let better = match &best {
                    None => true,
                    Some(b) => gain > b.gain || (gain == b.gain && feature < b.feature),
                };
                if better {
                    let mut threshold = xi + (next - xi) / 2.0;
                    if threshold >= next {
                        threshold = xi;
                    }
                    best = Some(Best { gain, feature, threshold, n_left });
                }
            }
        }

        let Some(best) = best else { continue };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| x[[r, best.feature]] <= best.threshold);
        debug_assert_eq!(left_rows.len(), best.n_left);
        let left = nodes.len();
        nodes.push(TreeNode::Leaf { value });
        nodes.push(TreeNode::Leaf { value });
        nodes[node] = TreeNode::Split { feature: best.feature, threshold: best.threshold, left, right: left + 1 };
        stack.push((left + 1, right_rows, depth + 1));
        stack.push((left, left_rows, depth + 1));
    }
    Tree { nodes }
}

fn sums(rows: &[usize], y: &[f64], weights: &[f64]) -> (f64, f64, f64) {
    rows.iter().fold((0.0, 0.0, 0.0), |(w, s, q), &r| {
        let (wr, yr) = (weights[r], y[r]);
        (w + wr, s + wr * yr, q + wr * yr * yr)
    })
}
