use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::forest::{max_features, Forest, ForestParams};
use super::gbt::BoostedTrees;
use super::knn::{KnnWeights, NearestNeighbours};
use super::logistic::Logistic;
use super::naive_bayes::GaussianNb;
use super::params::Family;
use super::preprocess::FittedPreprocessor;
use super::tree::{grow, Criterion, Tree, TreeParams};
use super::{Result, ZooError};
use crate::tabular::Dataset;

/// Version stamped into serialized pipelines.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "state", rename_all = "kebab-case")]
pub enum FittedModel {
    DecisionTree(Tree),
    RandomForest(Forest),
    GradientBoostedTrees(BoostedTrees),
    LogisticRegression(Logistic),
    KNearestNeighbours(NearestNeighbours),
    GaussianNaiveBayes(GaussianNb),
}

impl FittedModel {
    fn predict(&self, row: &[f64]) -> f64 {
        let p = match self {
            FittedModel::DecisionTree(t) => t.predict(row),
            FittedModel::RandomForest(f) => f.predict(row),
            FittedModel::GradientBoostedTrees(b) => b.predict(row),
            FittedModel::LogisticRegression(l) => l.predict(row),
            FittedModel::KNearestNeighbours(k) => k.predict(row),
            FittedModel::GaussianNaiveBayes(g) => g.predict(row),
        };
        p.clamp(0.0, 1.0)
    }
}

/// A fitted preprocessing step plus model. Immutable; prediction is pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub format_version: u32,
    pub config: PipelineConfig,
    pub preprocessor: FittedPreprocessor,
    pub model: FittedModel,
    pub train_fingerprint: String,
    pub column_names: Vec<String>,
}

impl TrainedPipeline {
    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    /// False only for a logistic regression that hit the iteration cap.
    pub fn converged(&self) -> bool {
        match &self.model {
            FittedModel::LogisticRegression(l) => l.converged,
            _ => true,
        }
    }

    /// Class-1 probability for each row of `rows`.
    pub fn predict_proba(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let mut out = vec![0.0; rows.nrows()];
        self.predict_into(rows, &mut out)?;
        Ok(out)
    }

    /// Like [`predict_proba`](Self::predict_proba), writing into `out`.
    pub fn predict_into(&self, rows: ArrayView2<'_, f64>, out: &mut [f64]) -> Result<()> {
        if rows.ncols() != self.n_features() {
            return Err(ZooError::DimensionMismatch { expected: self.n_features(), got: rows.ncols() });
        }
        assert_eq!(out.len(), rows.nrows(), "output length must match row count");
        let mut raw = vec![0.0; rows.ncols()];
        let mut scaled = vec![0.0; rows.ncols()];
        for (o, row) in out.iter_mut().zip(rows.rows()) {
            raw.iter_mut().zip(row.iter()).for_each(|(r, v)| *r = *v);
            self.preprocessor.apply_row(&raw, &mut scaled);
            *o = self.model.predict(&scaled);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        if p.format_version != FORMAT_VERSION {
            return Err(ZooError::FormatVersion(p.format_version));
        }
        Ok(p)
    }
}

/// Fits `config` on `data`. Scaling is learned from `data` alone.
pub fn train(config: &PipelineConfig, data: &Dataset) -> Result<TrainedPipeline> {
    if data.n_rows() == 0 {
        return Err(ZooError::Empty("training data"));
    }
    if data.class_counts().contains(&0) {
        return Err(ZooError::SingleClass);
    }
    let params = config.resolved()?;
    let int = |name: &str| params[name].as_int().expect("schema declares an integer") as usize;
    let real = |name: &str| params[name].as_real().expect("schema declares a real");
    let cat = |name: &str| params[name].as_cat().expect("schema declares a choice").to_string();

    let preprocessor = FittedPreprocessor::fit(config.preprocess, data.matrix());
    let x = preprocessor.apply(data.matrix());
    let labels = data.target();
    let y: Vec<f64> = labels.iter().map(|&v| v as f64).collect();
    let n = data.n_rows();
    let m = data.n_columns();
    let depth = |d: usize| if d == 0 { None } else { Some(d) };

    let model = match config.family {
        Family::DecisionTree => {
            let criterion = if cat("criterion") == "entropy" { Criterion::Entropy } else { Criterion::Gini };
            let p = TreeParams {
                criterion,
                max_depth: depth(int("max_depth")),
                min_samples_split: 2,
                min_samples_leaf: int("min_samples_leaf"),
                max_features: m,
            };
            FittedModel::DecisionTree(grow(x.view(), &y, &vec![1.0; n], (0..n).collect(), &p, None))
        }
        Family::RandomForest => {
            let p = ForestParams {
                n_trees: int("n_trees"),
                max_depth: depth(int("max_depth")),
                max_features: max_features(&cat("max_features"), m),
                bootstrap: true,
            };
            FittedModel::RandomForest(Forest::fit(x.view(), &y, &p, config.seed))
        }
        Family::GradientBoostedTrees => FittedModel::GradientBoostedTrees(BoostedTrees::fit(
            x.view(),
            &y,
            int("n_rounds"),
            real("learning_rate"),
            int("max_depth"),
        )),
        Family::LogisticRegression => FittedModel::LogisticRegression(Logistic::fit(x.view(), &y, real("l2"), config.seed)),
        Family::KNearestNeighbours => {
            let k = int("k");
            if k > n {
                return Err(ZooError::InvalidHyperparameter(format!("k = {k} exceeds {n} training rows")));
            }
            let weights = if cat("weights") == "distance" { KnnWeights::Distance } else { KnnWeights::Uniform };
            FittedModel::KNearestNeighbours(NearestNeighbours::fit(x.view(), labels, k, weights))
        }
        Family::GaussianNaiveBayes => {
            FittedModel::GaussianNaiveBayes(GaussianNb::fit(x.view(), labels, real("var_smoothing")))
        }
    };
    if let FittedModel::LogisticRegression(l) = &model {
        if !l.converged {
            tracing::debug!(config = config.id, "logistic regression stopped at the iteration cap");
        }
    }

    let mut config = config.clone();
    config.hyperparameters = params;
    Ok(TrainedPipeline {
        format_version: FORMAT_VERSION,
        config,
        preprocessor,
        model,
        train_fingerprint: data.fingerprint(),
        column_names: data.column_names().to_vec(),
    })
}

pub fn predict_proba(model: &TrainedPipeline, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    model.predict_proba(rows)
}

/// Fraction of rows where `p ≥ 0.5` agrees with the label.
pub fn accuracy(model: &TrainedPipeline, test: &Dataset) -> Result<f64> {
    if test.n_rows() == 0 {
        return Err(ZooError::Empty("test data"));
    }
    let p = model.predict_proba(test.matrix())?;
    Ok(accuracy_of(&p, test.target()))
}

pub(crate) fn accuracy_of(p: &[f64], labels: &[u8]) -> f64 {
    let hits = p.iter().zip(labels).filter(|(&p, &y)| (p >= 0.5) == (y == 1)).count();
    hits as f64 / labels.len() as f64
}

/// The frozen default forest.
pub fn baseline(train_data: &Dataset, seed: u64) -> Result<TrainedPipeline> {
    train(&PipelineConfig::baseline(seed), train_data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_arithmetic() {
        assert_eq!(accuracy_of(&[0.9, 0.1, 0.7, 0.2], &[1, 0, 1, 1]), 0.75);
        assert_eq!(accuracy_of(&[0.9, 0.1], &[1, 0]), 1.0);
        assert_eq!(accuracy_of(&[0.1, 0.9], &[1, 0]), 0.0);
        // The threshold is inclusive.
        assert_eq!(accuracy_of(&[0.5], &[1]), 1.0);
    }
}
