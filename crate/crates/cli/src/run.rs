//! Fully resolved command parameters: what `run_config.json` holds.
//!
//! Output directory and worker count are deliberately absent. Neither
//! changes any output byte, and leaving them out lets a replay into another
//! directory reproduce `run_config.json` itself.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use xhack::search::{DirectedParams, SearchMode, SearchSpace};
use xhack::shapley::ExplainerConfig;
use xhack::tabular::SimulationSpec;

use crate::args::ReportKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Simulate(SimulateRun),
    Search(SearchRun),
    Report(ReportRun),
    Detect(DetectRun),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Simulate(_) => "simulate",
            RunConfig::Search(_) => "search",
            RunConfig::Report(_) => "report",
            RunConfig::Detect(_) => "detect",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRun {
    pub spec: SimulationSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRun {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub seed: u64,
    pub test_fraction: f64,
    pub background: usize,
    pub eval_rows: usize,
    pub explainer: ExplainerConfig,
    pub space: SearchSpace,
    pub mode: SearchMode,
    /// Directed mode only.
    pub directed: Option<DirectedParams>,
    /// Cherry mode only.
    pub cherry: Option<CherryRun>,
}

/// Which explanations a cherry-pick looks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CherryRun {
    /// Column indices; every column when built from flags without --feature.
    pub features: Vec<usize>,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRun {
    pub result: PathBuf,
    pub kind: ReportKind,
    pub feature: Option<usize>,
    pub metric: Option<String>,
    pub min_accuracy: Option<f64>,
    pub bins: Option<usize>,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectRun {
    pub result: PathBuf,
    pub metric: String,
    pub reported: f64,
    pub alpha: f64,
    pub min_accuracy: Option<f64>,
}
