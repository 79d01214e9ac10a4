use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::params::Preprocess;

/// Per-column affine map `z = (x - shift) / scale`, fitted on training rows.
///
/// Columns without spread keep `shift = 0, scale = 1` and pass through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPreprocessor {
    pub kind: Preprocess,
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl FittedPreprocessor {
    pub fn fit(kind: Preprocess, x: ArrayView2<'_, f64>) -> Self {
        let m = x.ncols();
        let n = x.nrows() as f64;
        let mut shift = vec![0.0; m];
        let mut scale = vec![1.0; m];
        for j in 0..m {
            let col = x.column(j);
            match kind {
                Preprocess::None => {}
                Preprocess::Standardize => {
                    let mean = col.sum() / n;
                    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                    let sd = var.sqrt();
                    if sd > 0.0 && sd.is_finite() {
                        shift[j] = mean;
                        scale[j] = sd;
                    }
                }
                Preprocess::MinMax => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if hi > lo {
                        shift[j] = lo;
                        scale[j] = hi - lo;
                    }
                }
            }
        }
        Self { kind, shift, scale }
    }

    pub fn apply_row(&self, row: &[f64], out: &mut [f64]) {
        for (((o, &x), &s), &c) in out.iter_mut().zip(row).zip(&self.shift).zip(&self.scale) {
            *o = (x - s) / c;
        }
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> ndarray::Array2<f64> {
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for ((v, &s), &c) in row.iter_mut().zip(&self.shift).zip(&self.scale) {
                *v = (*v - s) / c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn standardize_and_passthrough() {
        let x = array![[1.0, 5.0], [3.0, 5.0]];
        let p = FittedPreprocessor::fit(Preprocess::Standardize, x.view());
        let z = p.apply(x.view());
        assert_eq!(z.column(0).to_vec(), vec![-1.0, 1.0]);
        // Constant column stays as it was.
        assert_eq!(z.column(1).to_vec(), vec![5.0, 5.0]);
    }

    #[test]
    fn min_max() {
        let x = array![[2.0], [4.0], [3.0]];
        let p = FittedPreprocessor::fit(Preprocess::MinMax, x.view());
        assert_eq!(p.apply(x.view()).column(0).to_vec(), vec![0.0, 1.0, 0.5]);
        let mut out = [0.0];
        p.apply_row(&[6.0], &mut out);
        assert_eq!(out[0], 2.0);
    }

    #[test]
    fn none_is_identity() {
        let x = array![[2.0, -1.0]];
        let p = FittedPreprocessor::fit(Preprocess::None, x.view());
        assert_eq!(p.apply(x.view()), x);
    }
}
