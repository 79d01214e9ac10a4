//! Reductions of a [`ShapMatrix`] to the summaries an analyst reports:
//! importance ranks and shares, their change against the baseline, and
//! per-feature dependence slopes.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::shapley::ShapMatrix;
use crate::tabular::SplitDataset;

/// Slopes smaller than this in magnitude count as "no linear effect".
pub const DEFAULT_SIGN_BAND: f64 = 1e-4;

/// "Top 3" as used for the topple criterion.
pub const DEFAULT_TOP_K: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SummaryError {
    #[error("feature counts differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("feature index {index} out of range for {m} features")]
    BadFeature { index: usize, m: usize },
    #[error("feature values have zero variance over the explained rows")]
    ZeroVariance,
    #[error("summary is degenerate (all attributions zero)")]
    Degenerate,
    #[error("empty SHAP matrix")]
    Empty,
}

pub type Result<T> = std::result::Result<T, SummaryError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceSummary {
    pub mean_abs: Vec<f64>,
    /// `mean_abs` normalized to sum to one; all zero when degenerate.
    pub shares: Vec<f64>,
    /// 1 is most important; equal importance goes to the lower column first.
    pub ranks: Vec<usize>,
    /// Set when every attribution is zero.
    pub degenerate: bool,
}

impl ImportanceSummary {
    pub fn from_mean_abs(mean_abs: Vec<f64>) -> Self {
        let total: f64 = mean_abs.iter().sum();
        let degenerate = total == 0.0;
        let shares = if degenerate { vec![0.0; mean_abs.len()] } else { mean_abs.iter().map(|v| v / total).collect() };
        let mut order: Vec<usize> = (0..mean_abs.len()).collect();
        order.sort_by(|&a, &b| mean_abs[b].total_cmp(&mean_abs[a]).then(a.cmp(&b)));
        let mut ranks = vec![0; mean_abs.len()];
        for (pos, &j) in order.iter().enumerate() {
            ranks[j] = pos + 1;
        }
        Self { mean_abs, shares, ranks, degenerate }
    }

    pub fn n_features(&self) -> usize {
        self.mean_abs.len()
    }
}

pub fn importance(shap: &ShapMatrix) -> Result<ImportanceSummary> {
    if shap.n_rows() == 0 {
        return Err(SummaryError::Empty);
    }
    let n = shap.n_rows() as f64;
    let mean_abs = (0..shap.n_features())
        .map(|j| shap.rows.iter().map(|r| r.values[j].abs()).sum::<f64>() / n)
        .collect();
    Ok(ImportanceSummary::from_mean_abs(mean_abs))
}

/// `baseline.shares − candidate.shares`; positive entries were demoted.
pub fn relative_change(baseline: &ImportanceSummary, candidate: &ImportanceSummary) -> Result<Vec<f64>> {
    if baseline.n_features() != candidate.n_features() {
        return Err(SummaryError::DimensionMismatch(baseline.n_features(), candidate.n_features()));
    }
    if baseline.degenerate || candidate.degenerate {
        return Err(SummaryError::Degenerate);
    }
    Ok(baseline.shares.iter().zip(&candidate.shares).map(|(b, c)| b - c).collect())
}

/// True iff `feature` ranks below the top `k` in `candidate`.
pub fn topple_check(candidate: &ImportanceSummary, feature: usize, k: usize) -> bool {
    candidate.ranks[feature] > k
}

/// Least-squares line `φ ≈ slope·x + intercept`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(SummaryError::DimensionMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(SummaryError::Empty);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(SummaryError::ZeroVariance);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Raw (unpreprocessed) values of `feature` at the explained rows.
pub fn eval_feature_values(shap: &ShapMatrix, split: &SplitDataset, feature: usize) -> Result<Vec<f64>> {
    let m = split.test.n_columns();
    if feature >= m || feature >= shap.n_features() {
        return Err(SummaryError::BadFeature { index: feature, m });
    }
    Ok(shap.sample.eval_rows.iter().map(|&r| split.test.matrix()[[r, feature]]).collect())
}

/// OLS of the feature's SHAP column on its raw values over the eval rows.
pub fn dependence_slope(shap: &ShapMatrix, split: &SplitDataset, feature: usize) -> Result<(f64, f64)> {
    let x = eval_feature_values(shap, split, feature)?;
    ols(&x, &shap.column(feature))
}

/// −1, 0 or +1, with `|slope| < band` mapped to 0.
pub fn slope_sign(slope: f64, band: f64) -> i8 {
    if slope.abs() < band {
        0
    } else if slope > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSlope {
    pub slope: f64,
    pub intercept: f64,
    pub sign: i8,
    /// Range of the feature over the explained rows, for drawing the line.
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub band: f64,
    /// `None` where the feature is constant over the explained rows.
    pub features: Vec<Option<FeatureSlope>>,
}

pub fn slopes(shap: &ShapMatrix, split: &SplitDataset, band: f64) -> Result<SlopeSummary> {
    let features = (0..shap.n_features())
        .map(|j| {
            let x = eval_feature_values(shap, split, j)?;
            match ols(&x, &shap.column(j)) {
                Ok((slope, intercept)) => Ok(Some(FeatureSlope {
                    slope,
                    intercept,
                    sign: slope_sign(slope, band),
                    x_min: x.iter().copied().fold(f64::INFINITY, f64::min),
                    x_max: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                })),
                Err(SummaryError::ZeroVariance) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SlopeSummary { band, features })
}

/// Violin-plot data: one row per candidate, one column per feature.
pub fn write_relative_change_csv<W: Write>(
    out: W,
    feature_names: &[String],
    rows: &[(u64, Vec<f64>)],
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["config_id".to_string()];
    header.extend(feature_names.iter().cloned());
    w.write_record(&header)?;
    for (id, values) in rows {
        let mut rec = vec![id.to_string()];
        rec.extend(values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        let s = ImportanceSummary::from_mean_abs(vec![1.0, 2.0, 1.0]);
        assert_eq!(s.ranks, vec![2, 1, 3]);
    }

    #[test]
    fn degenerate_summary() {
        let s = ImportanceSummary::from_mean_abs(vec![0.0, 0.0]);
        assert!(s.degenerate);
        assert_eq!(s.shares, vec![0.0, 0.0]);
        assert_eq!(s.ranks, vec![1, 2]);
        assert_eq!(relative_change(&s, &s), Err(SummaryError::Degenerate));
    }

    #[test]
    fn sign_band() {
        assert_eq!(slope_sign(5e-5, DEFAULT_SIGN_BAND), 0);
        assert_eq!(slope_sign(-5e-5, DEFAULT_SIGN_BAND), 0);
        assert_eq!(slope_sign(2e-4, DEFAULT_SIGN_BAND), 1);
        assert_eq!(slope_sign(-2e-4, DEFAULT_SIGN_BAND), -1);
    }

    #[test]
    fn ols_errors() {
        assert_eq!(ols(&[1.0, 1.0], &[0.0, 2.0]), Err(SummaryError::ZeroVariance));
        assert_eq!(ols(&[], &[]), Err(SummaryError::Empty));
    }
}
