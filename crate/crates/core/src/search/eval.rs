use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::space::obviousness;
use super::{Result, SearchError};
use crate::shapley::{explain_set, ExplainerConfig, ShapMatrix};
use crate::summary::{importance, slopes, ImportanceSummary, SlopeSummary, DEFAULT_SIGN_BAND};
use crate::tabular::{ExplainSample, SplitDataset};
use crate::zoo::{accuracy, train, PipelineConfig};

/// The signed per-feature number whose sign a directed search tries to flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    /// OLS slope of SHAP on the raw feature over the eval rows.
    #[default]
    Slope,
    MeanSignedShap,
}

/// Everything recorded about one evaluated pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub config: PipelineConfig,
    /// Accuracy on the full test split.
    pub accuracy: f64,
    pub importance: ImportanceSummary,
    pub slopes: SlopeSummary,
    /// Mean signed SHAP per feature over the eval rows.
    pub mean_shap: Vec<f64>,
    pub obviousness: f64,
    /// Set only by directed search.
    pub q_score: Option<f64>,
    pub degenerate: bool,
    /// False when a logistic regression stopped at its iteration cap.
    pub converged: bool,
}

impl EvalResult {
    pub fn id(&self) -> u64 {
        self.config.id
    }

    /// `None` when undefined: a degenerate explanation, or a feature that is
    /// constant over the eval rows (slope only).
    pub fn aggregate(&self, feature: usize, kind: Aggregate) -> Option<f64> {
        if self.degenerate {
            return None;
        }
        match kind {
            Aggregate::Slope => self.slopes.features.get(feature)?.as_ref().map(|s| s.slope),
            Aggregate::MeanSignedShap => self.mean_shap.get(feature).copied(),
        }
    }
}

/// A configuration that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedConfig {
    pub config: PipelineConfig,
    pub reason: String,
}

/// Trains, scores and explains one pipeline.
pub fn evaluate(
    config: &PipelineConfig,
    split: &SplitDataset,
    sample: &ExplainSample,
    cfg: &ExplainerConfig,
) -> Result<EvalResult> {
    Ok(evaluate_with_shap(config, split, sample, cfg, None)?.0)
}

pub(crate) fn evaluate_with_shap(
    config: &PipelineConfig,
    split: &SplitDataset,
    sample: &ExplainSample,
    cfg: &ExplainerConfig,
    time_limit: Option<f64>,
) -> Result<(EvalResult, ShapMatrix)> {
    let started = Instant::now();
    let model = train(config, &split.train)?;
    if let Some(limit) = time_limit {
        let took = started.elapsed().as_secs_f64();
        if took > limit {
            return Err(SearchError::TimeLimit { seconds: took, limit });
        }
    }
    let acc = accuracy(&model, &split.test)?;
    let shap = explain_set(&model, split, sample, cfg)?;
    let imp = importance(&shap)?;
    let slope = slopes(&shap, split, DEFAULT_SIGN_BAND)?;
    let n = shap.n_rows() as f64;
    let mean_shap = (0..shap.n_features()).map(|j| shap.column(j).iter().sum::<f64>() / n).collect();
    let result = EvalResult {
        config: model.config.clone(),
        accuracy: acc,
        degenerate: imp.degenerate,
        importance: imp,
        slopes: slope,
        mean_shap,
        obviousness: obviousness(&model.config),
        q_score: None,
        converged: model.converged(),
    };
    Ok((result, shap))
}
