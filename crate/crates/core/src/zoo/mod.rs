//! The model zoo: defensible pipeline families, the fixed baseline forest,
//! and class-1 probability prediction.
//!
//! Every learner is written here from scratch so that fitted state is plain
//! data, bit-exact across runs and serializable for audit replay.

mod config;
mod forest;
mod gbt;
mod knn;
mod logistic;
mod naive_bayes;
mod params;
mod pipeline;
mod preprocess;
mod tree;

pub use config::{PipelineConfig, BASELINE_ID};
pub use forest::Forest;
pub use gbt::BoostedTrees;
pub use knn::{KnnWeights, NearestNeighbours};
pub use logistic::Logistic;
pub use naive_bayes::GaussianNb;
pub use params::{resolve_params, Family, HyperValue, ParamRange, ParamSpec, Preprocess};
pub use pipeline::{accuracy, baseline, predict_proba, train, FittedModel, TrainedPipeline, FORMAT_VERSION};
pub use preprocess::FittedPreprocessor;
pub use tree::{Criterion, Tree, TreeNode};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("unsupported model format version {0}")]
    FormatVersion(u32),
    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ZooError>;
