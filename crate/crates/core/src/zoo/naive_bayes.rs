use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

/// Gaussian naive Bayes. Every per-class variance is inflated by
/// `var_smoothing` times the largest column variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl GaussianNb {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[u8], var_smoothing: f64) -> Self {
        let (n, m) = x.dim();
        let col_var = |rows: &[usize], j: usize| {
            let k = rows.len() as f64;
            let mean = rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / k;
            let var = rows.iter().map(|&i| (x[[i, j]] - mean).powi(2)).sum::<f64>() / k;
            (mean, var)
        };
        let all: Vec<usize> = (0..n).collect();
        let epsilon = var_smoothing * (0..m).map(|j| col_var(&all, j).1).fold(0.0, f64::max);
        let mut means = [vec![0.0; m], vec![0.0; m]];
        let mut variances = [vec![0.0; m], vec![0.0; m]];
        let mut log_prior = [0.0; 2];
        for c in 0..2 {
            let rows: Vec<usize> = (0..n).filter(|&i| y[i] as usize == c).collect();
            log_prior[c] = (rows.len() as f64 / n as f64).ln();
            for j in 0..m {
                let (mean, var) = col_var(&rows, j);
                means[c][j] = mean;
                // A tiny floor keeps fully constant data from dividing by zero.
                variances[c][j] = (var + epsilon).max(f64::MIN_POSITIVE);
            }
        }
        Self { log_prior, means, variances }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let joint = |c: usize| {
            self.log_prior[c]
                + row
                    .iter()
                    .zip(&self.means[c])
                    .zip(&self.variances[c])
                    .map(|((x, mu), var)| -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mu).powi(2) / var))
                    .sum::<f64>()
        };
        let (l0, l1) = (joint(0), joint(1));
        // P(1) = 1 / (1 + exp(l0 - l1)), evaluated without overflow.
        super::gbt::sigmoid(l1 - l0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn symmetric_midpoint_is_half() {
        let x = array![[-2.0], [-1.0], [-3.0], [2.0], [1.0], [3.0]];
        let m = GaussianNb::fit(x.view(), &[0, 0, 0, 1, 1, 1], 1e-9);
        assert!((m.predict(&[0.0]) - 0.5).abs() < 1e-9);
        assert!(m.predict(&[1.0]) > 0.5);
    }
}
