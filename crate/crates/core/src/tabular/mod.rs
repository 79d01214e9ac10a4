//! Tabular binary-classification data: schema, encoding, splitting,
//! simulation, and the frozen explanation sample.

mod dataset;
mod load;
mod sample;
mod schema;
mod simulate;
mod split;

pub use dataset::{ColumnGroup, Dataset, Provenance};
pub use load::{load_csv, load_csv_reader};
pub use sample::{draw_explain_sample, ExplainSample};
pub use schema::{FeatureKind, FeatureSchema, FeatureSpec};
pub use simulate::{simulate_collinear, F1Source, SimulationSpec, TargetRule};
pub use split::{split, SplitDataset, SplitIndices};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("header does not match schema: {0}")]
    HeaderMismatch(String),
    #[error("row {row}: column `{column}` has unknown level `{value}`")]
    UnknownLevel { row: usize, column: String, value: String },
    #[error("row {row}: column `{column}` is not a number: `{value}`")]
    BadNumber { row: usize, column: String, value: String },
    #[error("row {row}: target value `{value}` is not binary")]
    NonBinaryTarget { row: usize, value: String },
    #[error("no rows left after removing rows with missing values")]
    EmptyAfterRemoval,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("cannot stratify: {0}")]
    Stratification(String),
    #[error("invalid simulation spec: {0}")]
    InvalidSimulation(String),
    #[error("sample of {requested} rows requested from {available} available ({which})")]
    SampleTooLarge { which: &'static str, requested: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, TabularError>;
