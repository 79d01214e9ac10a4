//! Per-instance Shapley attributions of the class-1 probability.
//!
//! [`kernel_shap`] is the production explainer; [`exact_shapley`] enumerates
//! the Shapley formula directly and exists to check it.

mod exact;
mod kernel;
mod matrix;

pub use exact::{exact_shapley, EXACT_MAX_FEATURES};
pub use kernel::{kernel_shap, kernel_weight, KERNEL_EXACT_MAX_FEATURES};
pub use matrix::{explain_set, ShapMatrix};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zoo::{TrainedPipeline, ZooError};

/// Tolerance on `Σφ + base = f(x)` for every emitted vector.
pub const EFFICIENCY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ShapError {
    #[error("background is empty")]
    EmptyBackground,
    #[error("instance has {got} features, background has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{m} features is too many for exhaustive enumeration (limit {limit})")]
    TooManyFeatures { m: usize, limit: usize },
    #[error("coalition budget {budget} is below 2·M = {min}")]
    BudgetTooSmall { budget: usize, min: usize },
    #[error("weighted least-squares system is singular even with ridge {ridge}")]
    Singular { ridge: f64 },
    #[error("efficiency violated by {gap:e}")]
    Efficiency { gap: f64 },
    #[error("invalid explainer config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ZooError),
}

pub type Result<T> = std::result::Result<T, ShapError>;

/// Anything that maps rows to class-1 probabilities.
pub trait Predict: Sync {
    fn predict_rows(&self, rows: ArrayView2<'_, f64>, out: &mut [f64]);
}

impl<F> Predict for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn predict_rows(&self, rows: ArrayView2<'_, f64>, out: &mut [f64]) {
        let mut buf = vec![0.0; rows.ncols()];
        for (o, row) in out.iter_mut().zip(rows.rows()) {
            buf.iter_mut().zip(row.iter()).for_each(|(b, v)| *b = *v);
            *o = self(&buf);
        }
    }
}

impl Predict for TrainedPipeline {
    /// Callers check the column count first; see [`explain_set`].
    fn predict_rows(&self, rows: ArrayView2<'_, f64>, out: &mut [f64]) {
        self.predict_into(rows, out).expect("column count checked before explaining");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplainMode {
    #[serde(alias = "exact")]
    ExactEnumeration,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainerConfig {
    pub mode: ExplainMode,
    /// Coalitions evaluated in sampled mode.
    #[serde(default = "default_budget")]
    pub coalition_budget: usize,
    /// Ridge added to the normal equations, only once they prove singular.
    #[serde(default = "default_ridge")]
    pub ridge_epsilon: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_budget() -> usize {
    2048
}

fn default_ridge() -> f64 {
    1e-6
}

fn default_seed() -> u64 {
    crate::DEFAULT_SEED
}

impl Default for ExplainerConfig {
    fn default() -> Self {
        Self::exact()
    }
}

impl ExplainerConfig {
    pub fn exact() -> Self {
        Self {
            mode: ExplainMode::ExactEnumeration,
            coalition_budget: default_budget(),
            ridge_epsilon: default_ridge(),
            seed: default_seed(),
        }
    }

    pub fn sampled(coalition_budget: usize, seed: u64) -> Self {
        Self { mode: ExplainMode::Sampled, coalition_budget, ridge_epsilon: default_ridge(), seed }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.ridge_epsilon >= 0.0 && self.ridge_epsilon.is_finite()) {
            return Err(ShapError::InvalidConfig(format!("ridge_epsilon {} must be finite and ≥ 0", self.ridge_epsilon)));
        }
        match self.mode {
            ExplainMode::ExactEnumeration if m > KERNEL_EXACT_MAX_FEATURES => {
                Err(ShapError::TooManyFeatures { m, limit: KERNEL_EXACT_MAX_FEATURES })
            }
            ExplainMode::Sampled if self.coalition_budget < 2 * m => {
                Err(ShapError::BudgetTooSmall { budget: self.coalition_budget, min: 2 * m })
            }
            _ => Ok(()),
        }
    }
}

/// Attributions for one explained row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapVector {
    pub values: Vec<f64>,
    /// Mean model output over the background.
    pub base_value: f64,
    /// Model output at the explained row.
    pub instance_output: f64,
}

impl ShapVector {
    pub fn efficiency_gap(&self) -> f64 {
        (self.values.iter().sum::<f64>() + self.base_value - self.instance_output).abs()
    }

    pub(crate) fn checked(self) -> Result<Self> {
        let gap = self.efficiency_gap();
        if gap.is_nan() || gap > EFFICIENCY_TOL {
            return Err(ShapError::Efficiency { gap });
        }
        Ok(self)
    }
}

fn check_inputs(instance: &[f64], background: ArrayView2<'_, f64>) -> Result<()> {
    if background.nrows() == 0 {
        return Err(ShapError::EmptyBackground);
    }
    if instance.len() != background.ncols() {
        return Err(ShapError::DimensionMismatch { expected: background.ncols(), got: instance.len() });
    }
    Ok(())
}

/// Mean prediction for each coalition, where coalition `c` keeps the
/// instance value of feature `j` iff `masks[c][j]` and takes the background
/// value otherwise. All masked rows go to the model in a single batch.
fn coalition_values<P: Predict + ?Sized>(
    model: &P,
    instance: &[f64],
    background: ArrayView2<'_, f64>,
    masks: &[Vec<bool>],
) -> Vec<f64> {
    let (b, m) = background.dim();
    let mut rows = Array2::zeros((masks.len() * b, m));
    for (c, mask) in masks.iter().enumerate() {
        for (r, bg) in background.rows().into_iter().enumerate() {
            let mut row = rows.row_mut(c * b + r);
            for j in 0..m {
                row[j] = if mask[j] { instance[j] } else { bg[j] };
            }
        }
    }
    let mut out = vec![0.0; rows.nrows()];
    model.predict_rows(rows.view(), &mut out);
    out.chunks(b).map(|chunk| chunk.iter().sum::<f64>() / b as f64).collect()
}

/// Model output at the instance and mean output over the background.
fn endpoints<P: Predict + ?Sized>(model: &P, instance: &[f64], background: ArrayView2<'_, f64>) -> (f64, f64) {
    let m = instance.len();
    let v = coalition_values(model, instance, background, &[vec![false; m]]);
    let mut fx = [0.0];
    let row = ndarray::ArrayView2::from_shape((1, m), instance).expect("one row of length m");
    model.predict_rows(row, &mut fx);
    (fx[0], v[0])
}
