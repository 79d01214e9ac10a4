//! On-disk form of a [`SearchResult`]: the interchange artifact between the
//! search, report and audit steps.
//!
//! ```text
//! <dir>/manifest.json          run metadata, ranking, failures
//! <dir>/candidates/00000.json  one EvalResult per pipeline (00000 = baseline)
//! <dir>/summary.csv            one row per pipeline: accuracy, shares, slopes, Q
//! <dir>/relative_change.csv    importance change vs the baseline, per candidate
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{EvalResult, FailedConfig, ResolvedDirected, SearchMode, SearchResult, SearchSpace};
use crate::shapley::ExplainerConfig;
use crate::summary::{relative_change, write_relative_change_csv};
use crate::tabular::ExplainSample;

pub const RESULT_FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const RELATIVE_CHANGE_CSV: &str = "relative_change.csv";
const CANDIDATES: &str = "candidates";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("result format {found} is not supported (expected {RESULT_FORMAT_VERSION})")]
    FormatVersion { found: u32 },
    #[error("manifest lists config {0} but its candidate file is missing or mismatched")]
    MissingCandidate(u64),
}

pub type Result<T> = std::result::Result<T, PersistError>;

/// Who wrote the directory and from what.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    /// Input name → SHA-256 of its bytes.
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub provenance: Provenance,
    pub mode: SearchMode,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub baseline_id: u64,
    pub best_by_accuracy_id: u64,
    /// Candidate ids in result order.
    pub ranking: Vec<u64>,
    pub failures: Vec<FailedConfig>,
    pub explain_sample: ExplainSample,
    pub explainer: ExplainerConfig,
    pub space: SearchSpace,
    pub directed: Option<ResolvedDirected>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PersistError + '_ {
    move |source| PersistError::Io { path: path.to_path_buf(), source }
}

fn candidate_path(dir: &Path, id: u64) -> PathBuf {
    dir.join(CANDIDATES).join(format!("{id:05}.json"))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| PersistError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| PersistError::Json { path: path.to_path_buf(), source })
}

fn write_csv_file(path: &Path, f: impl FnOnce(BufWriter<fs::File>) -> std::result::Result<(), csv::Error>) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    f(BufWriter::new(file)).map_err(|source| PersistError::Csv { path: path.to_path_buf(), source })
}

/// Writes `result` under `dir`, creating it if needed. Output bytes depend
/// only on `result` and `provenance`.
pub fn save(result: &SearchResult, dir: &Path, provenance: &Provenance) -> Result<()> {
    let cdir = dir.join(CANDIDATES);
    fs::create_dir_all(&cdir).map_err(io_err(&cdir))?;
    let manifest = Manifest {
        format_version: RESULT_FORMAT_VERSION,
        provenance: provenance.clone(),
        mode: result.mode,
        seed: result.seed,
        feature_names: result.feature_names.clone(),
        baseline_id: result.baseline.id(),
        best_by_accuracy_id: result.best_by_accuracy.id(),
        ranking: result.candidates.iter().map(EvalResult::id).collect(),
        failures: result.failures.clone(),
        explain_sample: result.explain_sample.clone(),
        explainer: result.explainer.clone(),
        space: result.space.clone(),
        directed: result.directed.clone(),
    };
    write_json(&dir.join(MANIFEST), &manifest)?;
    for e in result.all() {
        write_json(&candidate_path(dir, e.id()), e)?;
    }
    write_csv_file(&dir.join(SUMMARY_CSV), |w| write_summary_csv(w, result))?;
    let rows = relative_change_rows(result);
    write_csv_file(&dir.join(RELATIVE_CHANGE_CSV), |w| write_relative_change_csv(w, &result.feature_names, &rows))?;
    Ok(())
}

/// Reads a directory written by [`save`].
pub fn load(dir: &Path) -> Result<(SearchResult, Manifest)> {
    let manifest: Manifest = read_json(&dir.join(MANIFEST))?;
    if manifest.format_version != RESULT_FORMAT_VERSION {
        return Err(PersistError::FormatVersion { found: manifest.format_version });
    }
    let read = |id: u64| -> Result<EvalResult> {
        let e: EvalResult = read_json(&candidate_path(dir, id))?;
        if e.id() != id {
            return Err(PersistError::MissingCandidate(id));
        }
        Ok(e)
    };
    let baseline = read(manifest.baseline_id)?;
    let candidates = manifest.ranking.iter().map(|&id| read(id)).collect::<Result<Vec<_>>>()?;
    let best_by_accuracy = if manifest.best_by_accuracy_id == baseline.id() {
        baseline.clone()
    } else {
        candidates
            .iter()
            .find(|c| c.id() == manifest.best_by_accuracy_id)
            .cloned()
            .ok_or(PersistError::MissingCandidate(manifest.best_by_accuracy_id))?
    };
    let result = SearchResult {
        mode: manifest.mode,
        seed: manifest.seed,
        feature_names: manifest.feature_names.clone(),
        baseline,
        best_by_accuracy,
        candidates,
        failures: manifest.failures.clone(),
        explain_sample: manifest.explain_sample.clone(),
        explainer: manifest.explainer.clone(),
        space: manifest.space.clone(),
        directed: manifest.directed.clone(),
    };
    Ok((result, manifest))
}

/// Per-feature change in importance share against the baseline, for every
/// candidate whose explanation is not degenerate. Empty when the baseline's
/// explanation is degenerate.
pub fn relative_change_rows(result: &SearchResult) -> Vec<(u64, Vec<f64>)> {
    let mut rows: Vec<(u64, Vec<f64>)> = result
        .candidates
        .iter()
        .filter_map(|c| relative_change(&result.baseline.importance, &c.importance).ok().map(|v| (c.id(), v)))
        .collect();
    rows.sort_by_key(|r| r.0);
    rows
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Baseline first, then candidates in result order. Empty cells mark
/// undefined values.
pub fn write_summary_csv<W: Write>(out: W, result: &SearchResult) -> std::result::Result<(), csv::Error> {
    let names = &result.feature_names;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "config_id", "role", "family", "preprocess", "accuracy", "q_score", "obviousness", "degenerate", "converged",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for prefix in ["share", "rank", "slope", "intercept", "mean_shap"] {
        header.extend(names.iter().map(|n| format!("{prefix}_{n}")));
    }
    w.write_record(&header)?;
    for (k, e) in result.all().enumerate() {
        let mut rec = vec![
            e.id().to_string(),
            if k == 0 { "baseline" } else { "candidate" }.to_string(),
            e.config.family.name().to_string(),
            e.config.preprocess.name().to_string(),
            e.accuracy.to_string(),
            opt(e.q_score),
            e.obviousness.to_string(),
            e.degenerate.to_string(),
            e.converged.to_string(),
        ];
        rec.extend(e.importance.shares.iter().map(|v| v.to_string()));
        rec.extend(e.importance.ranks.iter().map(|v| v.to_string()));
        rec.extend(e.slopes.features.iter().map(|s| opt(s.as_ref().map(|s| s.slope))));
        rec.extend(e.slopes.features.iter().map(|s| opt(s.as_ref().map(|s| s.intercept))));
        rec.extend(e.mean_shap.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
