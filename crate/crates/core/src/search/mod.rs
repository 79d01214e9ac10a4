//! Searching the space of defensible pipelines.
//!
//! [`search`] evaluates a uniform random sample of configurations against the
//! baseline forest; [`cherry_pick`] then filters the accuracy-superior ones
//! for a desired explanation. [`directed_search`] ranks the same kind of
//! sample by the scalarized objective of [`directed_score`].

mod directed;
mod eval;
mod pareto;
mod space;

pub use directed::{directed_score, lambda_bound, DirectedParams, LambdaDenominator, ResolvedDirected};
pub use eval::{evaluate, Aggregate, EvalResult, FailedConfig};
pub use pareto::{aggregate_range, non_dominated_sort, pareto_front, pareto_points, ParetoPoint, Sense};
pub use space::{obviousness, sample_configs, SearchSpace};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::shapley::{ExplainerConfig, ShapError};
use crate::summary::{slope_sign, topple_check, SummaryError, DEFAULT_SIGN_BAND};
use crate::tabular::{ExplainSample, SplitDataset};
use crate::zoo::{PipelineConfig, ZooError};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("training took {seconds:.2}s, over the {limit}s limit")]
    TimeLimit { seconds: f64, limit: f64 },
    #[error("cannot derive λ: {0}")]
    Lambda(String),
    #[error("candidate {id}: {why}")]
    Undefined { id: u64, why: String },
    #[error("baseline aggregate for the target feature has no sign")]
    ZeroBaselineSign,
    #[error("baseline evaluation failed: {0}")]
    Baseline(String),
    #[error("every candidate failed")]
    AllFailed,
    #[error("target feature {index} out of range for {m} features")]
    BadFeature { index: usize, m: usize },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Model(#[from] ZooError),
    #[error(transparent)]
    Shap(#[from] ShapError),
    #[error(transparent)]
    Summary(#[from] SummaryError),
}

pub type Result<T> = std::result::Result<T, SearchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Accuracy-only search; explanations filtered afterwards.
    Cherry,
    Directed,
}

/// Outcome of one search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub mode: SearchMode,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub baseline: EvalResult,
    /// Most accurate of baseline and candidates; earlier id on ties.
    pub best_by_accuracy: EvalResult,
    /// By config id, or by descending `q_score` after a directed search.
    pub candidates: Vec<EvalResult>,
    pub failures: Vec<FailedConfig>,
    pub explain_sample: ExplainSample,
    pub explainer: ExplainerConfig,
    pub space: SearchSpace,
    pub directed: Option<ResolvedDirected>,
}

impl SearchResult {
    /// Baseline followed by every candidate.
    pub fn all(&self) -> impl Iterator<Item = &EvalResult> {
        std::iter::once(&self.baseline).chain(&self.candidates)
    }

    pub fn candidate(&self, id: u64) -> Option<&EvalResult> {
        self.all().find(|e| e.id() == id)
    }
}

/// Runs `f` on a pool of `workers` threads; 0 uses the global pool.
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Evaluates the baseline and `space.budget` sampled configs.
///
/// Candidates are evaluated in parallel and returned by config id, so the
/// result does not depend on `workers`. Failed configs are logged and kept
/// aside.
pub fn search(
    space: &SearchSpace,
    split: &SplitDataset,
    sample: &ExplainSample,
    cfg: &ExplainerConfig,
    seed: u64,
    workers: usize,
) -> Result<SearchResult> {
    let configs = sample_configs(space, seed)?;
    let limit = space.per_config_time_limit;
    let baseline_config = PipelineConfig::baseline(seed);
    let (baseline, outcomes) = with_workers(workers, || {
        let baseline = eval::evaluate_with_shap(&baseline_config, split, sample, cfg, None).map(|r| r.0);
        let outcomes: Vec<_> = configs
            .par_iter()
            .map(|c| eval::evaluate_with_shap(c, split, sample, cfg, limit).map(|r| r.0))
            .collect();
        (baseline, outcomes)
    })?;
    let baseline = baseline.map_err(|e| SearchError::Baseline(e.to_string()))?;

    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for (config, outcome) in configs.into_iter().zip(outcomes) {
        match outcome {
            Ok(r) => candidates.push(r),
            Err(e) => {
                tracing::warn!(config = config.id, reason = %e, "candidate failed");
                failures.push(FailedConfig { config, reason: e.to_string() });
            }
        }
    }
    if candidates.is_empty() {
        return Err(SearchError::AllFailed);
    }
    let best_by_accuracy = std::iter::once(&baseline)
        .chain(&candidates)
        .fold(None::<&EvalResult>, |best, e| match best {
            Some(b) if b.accuracy >= e.accuracy => Some(b),
            _ => Some(e),
        })
        .expect("baseline is present")
        .clone();
    Ok(SearchResult {
        mode: SearchMode::Cherry,
        seed,
        feature_names: split.train.column_names().to_vec(),
        baseline,
        best_by_accuracy,
        candidates,
        failures,
        explain_sample: sample.clone(),
        explainer: cfg.clone(),
        space: space.clone(),
        directed: None,
    })
}

/// Search ranked by `Q`, highest first; ties and unscorable candidates
/// (degenerate or undefined aggregate, listed last) go by config id.
pub fn directed_search(
    space: &SearchSpace,
    split: &SplitDataset,
    sample: &ExplainSample,
    params: &DirectedParams,
    cfg: &ExplainerConfig,
    seed: u64,
    workers: usize,
) -> Result<SearchResult> {
    let m = split.train.n_columns();
    if params.target_feature >= m {
        return Err(SearchError::BadFeature { index: params.target_feature, m });
    }
    let mut result = search(space, split, sample, cfg, seed, workers)?;
    let resolved = resolve(params, &result, split.test.n_rows())?;
    for c in &mut result.candidates {
        c.q_score = directed_score(c, &resolved).ok();
    }
    rank_by_q(&mut result.candidates);
    result.mode = SearchMode::Directed;
    result.directed = Some(resolved);
    Ok(result)
}

/// Sorts by `q_score` descending, then config id; unscored candidates last.
pub fn rank_by_q(candidates: &mut [EvalResult]) {
    candidates.sort_by(|a, b| match (a.q_score, b.q_score) {
        (Some(x), Some(y)) => y.total_cmp(&x).then(a.id().cmp(&b.id())),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.id().cmp(&b.id()),
    });
}

/// Fills in the baseline sign and λ from the evaluated baseline and best model.
///
/// When no model beats the baseline the accuracy gap is taken as one test
/// row, `1/n_test`, so that λ stays positive.
fn resolve(params: &DirectedParams, result: &SearchResult, n_test: usize) -> Result<ResolvedDirected> {
    let v = params.target_feature;
    let base_x = result
        .baseline
        .aggregate(v, params.signed_aggregate)
        .ok_or(SearchError::Undefined { id: result.baseline.id(), why: "baseline aggregate undefined".into() })?;
    let sign = match params.baseline_sign {
        Some(s) if s != 0 => s.signum(),
        Some(_) => return Err(SearchError::ZeroBaselineSign),
        None => match slope_sign(base_x, DEFAULT_SIGN_BAND) {
            0 => return Err(SearchError::ZeroBaselineSign),
            s => s,
        },
    };
    let lambda = match params.lambda {
        Some(l) if l >= 0.0 && l.is_finite() => l,
        Some(l) => return Err(SearchError::Lambda(format!("λ = {l} must be finite and ≥ 0"))),
        None => {
            let base = result.baseline.accuracy;
            let best = result.best_by_accuracy.accuracy.max(base + 1.0 / n_test as f64);
            let magnitude = match params.lambda_denominator {
                LambdaDenominator::Baseline => base_x.abs(),
                LambdaDenominator::BestByAccuracy => result
                    .best_by_accuracy
                    .aggregate(v, params.signed_aggregate)
                    .ok_or(SearchError::Lambda("best model's aggregate is undefined".into()))?
                    .abs(),
            };
            lambda_bound(best, base, magnitude)?
        }
    };
    if !(params.mu >= 0.0 && params.mu.is_finite()) {
        return Err(SearchError::Lambda(format!("μ = {} must be finite and ≥ 0", params.mu)));
    }
    Ok(ResolvedDirected {
        target_feature: v,
        lambda,
        mu: params.mu,
        baseline_sign: sign,
        signed_aggregate: params.signed_aggregate,
    })
}

/// An explanation a cherry-picker hopes to find.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Condition {
    /// The feature falls out of the top `k` importance ranks.
    Topple { feature: usize, k: usize },
    /// The feature's aggregate has the opposite nonzero sign to the baseline's.
    Flip { feature: usize, #[serde(default)] aggregate: Aggregate },
}

impl Condition {
    /// Degenerate candidates satisfy nothing.
    pub fn holds(&self, baseline: &EvalResult, candidate: &EvalResult) -> bool {
        if candidate.degenerate {
            return false;
        }
        match *self {
            Condition::Topple { feature, k } => topple_check(&candidate.importance, feature, k),
            Condition::Flip { feature, aggregate } => {
                let sign = |e: &EvalResult| e.aggregate(feature, aggregate).map(|x| slope_sign(x, DEFAULT_SIGN_BAND));
                matches!((sign(baseline), sign(candidate)), (Some(b), Some(c)) if b != 0 && c == -b)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CherryPick {
    /// Accuracy-superior candidates meeting the condition, by config id.
    pub picked: Vec<EvalResult>,
    /// Candidates strictly more accurate than the baseline.
    pub superior: usize,
    /// `picked / superior`; `None` when nothing beats the baseline.
    pub proportion: Option<f64>,
}

pub fn cherry_pick(result: &SearchResult, condition: impl Fn(&EvalResult) -> bool) -> CherryPick {
    let base = result.baseline.accuracy;
    let mut superior: Vec<&EvalResult> = result.candidates.iter().filter(|c| c.accuracy > base).collect();
    superior.sort_by_key(|c| c.id());
    let picked: Vec<EvalResult> = superior.iter().filter(|c| condition(c)).map(|c| (*c).clone()).collect();
    let proportion = (!superior.is_empty()).then(|| picked.len() as f64 / superior.len() as f64);
    CherryPick { superior: superior.len(), picked, proportion }
}
