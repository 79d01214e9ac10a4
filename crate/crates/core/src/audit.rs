//! Locating a reported explanation metric within the distribution that an
//! honest search over comparable pipelines produces.
//!
//! A value in the far tails of that distribution is not proof of
//! manipulation, but it is what an explanation cherry-picked from many
//! pipelines tends to look like.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{EvalResult, SearchMode, SearchResult, SearchSpace};

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("bad metric `{0}`: expected slope:<feature>, share:<feature>, rank:<feature> or mean-shap:<feature>")]
    BadMetric(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("no candidate with accuracy ≥ {min_accuracy} has a defined {metric}")]
    Empty { metric: String, min_accuracy: f64 },
    #[error("alpha {0} must lie in (0, 1)")]
    Alpha(f64),
    #[error("histogram needs at least one bin")]
    Bins,
}

pub type Result<T> = std::result::Result<T, AuditError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Dependence slope of the feature's SHAP values.
    Slope,
    /// Share of total mean |SHAP|.
    Share,
    /// Importance rank, 1 = most important.
    Rank,
    MeanShap,
}

impl MetricKind {
    fn name(self) -> &'static str {
        match self {
            MetricKind::Slope => "slope",
            MetricKind::Share => "share",
            MetricKind::Rank => "rank",
            MetricKind::MeanShap => "mean-shap",
        }
    }
}

/// A metric on one feature, written `kind:feature` where the feature is a
/// column name or index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Metric {
    pub kind: MetricKind,
    pub feature: String,
}

impl FromStr for Metric {
    type Err = AuditError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, feature) = s.split_once(':').ok_or_else(|| AuditError::BadMetric(s.into()))?;
        let kind = match kind {
            "slope" => MetricKind::Slope,
            "share" => MetricKind::Share,
            "rank" => MetricKind::Rank,
            "mean-shap" | "mean_shap" => MetricKind::MeanShap,
            _ => return Err(AuditError::BadMetric(s.into())),
        };
        if feature.is_empty() {
            return Err(AuditError::BadMetric(s.into()));
        }
        Ok(Self { kind, feature: feature.into() })
    }
}

impl TryFrom<String> for Metric {
    type Error = AuditError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.to_string()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.feature)
    }
}

impl Metric {
    fn column(&self, names: &[String]) -> Result<usize> {
        if let Some(j) = names.iter().position(|n| *n == self.feature) {
            return Ok(j);
        }
        match self.feature.parse::<usize>() {
            Ok(j) if j < names.len() => Ok(j),
            _ => Err(AuditError::UnknownFeature(self.feature.clone())),
        }
    }

    /// `None` for degenerate candidates and undefined slopes.
    pub fn value(&self, eval: &EvalResult, column: usize) -> Option<f64> {
        if eval.degenerate {
            return None;
        }
        match self.kind {
            MetricKind::Slope => eval.slopes.features.get(column)?.as_ref().map(|s| s.slope),
            MetricKind::Share => eval.importance.shares.get(column).copied(),
            MetricKind::Rank => eval.importance.ranks.get(column).map(|&r| r as f64),
            MetricKind::MeanShap => eval.mean_shap.get(column).copied(),
        }
    }
}

/// Which search a distribution came from; the audit makes no claim that its
/// space is representative, so the space travels with the numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRef {
    pub mode: SearchMode,
    pub seed: u64,
    pub n_candidates: usize,
    pub baseline_accuracy: f64,
    pub space: SearchSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDistribution {
    pub metric_name: Metric,
    /// Ascending.
    pub values: Vec<f64>,
    /// Candidates below this accuracy were left out.
    pub min_accuracy: f64,
    /// Config ids behind `values`, in the same order.
    pub config_ids: Vec<u64>,
    pub source: SourceRef,
}

/// Collects `metric` over the candidates of `result` with accuracy at least
/// `min_accuracy`. The baseline itself is not included.
pub fn build_distribution(result: &SearchResult, metric: &Metric, min_accuracy: f64) -> Result<MetricDistribution> {
    let column = metric.column(&result.feature_names)?;
    let mut pairs: Vec<(f64, u64)> = result
        .candidates
        .iter()
        .filter(|c| c.accuracy >= min_accuracy)
        .filter_map(|c| metric.value(c, column).map(|v| (v, c.id())))
        .collect();
    if pairs.is_empty() {
        return Err(AuditError::Empty { metric: metric.to_string(), min_accuracy });
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (values, config_ids) = pairs.into_iter().unzip();
    Ok(MetricDistribution {
        metric_name: metric.clone(),
        values,
        min_accuracy,
        config_ids,
        source: SourceRef {
            mode: result.mode,
            seed: result.seed,
            n_candidates: result.candidates.len(),
            baseline_accuracy: result.baseline.accuracy,
            space: result.space.clone(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub metric_name: Metric,
    pub reported_value: f64,
    /// Midrank position: `(below + equal/2) / n`.
    pub empirical_percentile: f64,
    pub two_sided_tail: f64,
    pub alpha: f64,
    pub flagged: bool,
    pub outside_range: bool,
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

impl MetricDistribution {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn percentile(&self, x: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < x);
        let not_above = self.values.partition_point(|&v| v <= x);
        (below as f64 + 0.5 * (not_above - below) as f64) / self.values.len() as f64
    }

    /// One value per line under a `value` header.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value"])?;
        for v in &self.values {
            w.write_record([v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Equal-width bins over `[min, max]`; the last bin is closed.
    pub fn histogram(&self, bins: usize) -> Result<Histogram> {
        if bins == 0 {
            return Err(AuditError::Bins);
        }
        let (lo, hi) = (self.min(), self.max());
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in &self.values {
            let k = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
            counts[k] += 1;
        }
        let edges = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
        Ok(Histogram { metric_name: self.metric_name.clone(), edges, counts })
    }
}

/// Sturges' rule: `⌈log₂ n⌉ + 1` bins.
pub fn default_bins(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub metric_name: Metric,
    /// `counts.len() + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Where `reported` falls in `dist`. Flagged when its two-sided tail is below
/// `alpha` or it lies outside the observed range.
pub fn locate(dist: &MetricDistribution, reported: f64, alpha: f64) -> Result<TailReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AuditError::Alpha(alpha));
    }
    let p = dist.percentile(reported);
    let tail = 2.0 * p.min(1.0 - p);
    let outside_range = reported < dist.min() || reported > dist.max();
    Ok(TailReport {
        metric_name: dist.metric_name.clone(),
        reported_value: reported,
        empirical_percentile: p,
        two_sided_tail: tail,
        alpha,
        flagged: tail < alpha || outside_range,
        outside_range,
        n: dist.values.len(),
        min: dist.min(),
        max: dist.max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(values: Vec<f64>) -> MetricDistribution {
        let n = values.len();
        MetricDistribution {
            metric_name: "slope:f1".parse().unwrap(),
            values,
            min_accuracy: 0.0,
            config_ids: (1..=n as u64).collect(),
            source: SourceRef {
                mode: SearchMode::Cherry,
                seed: 0,
                n_candidates: n,
                baseline_accuracy: 0.0,
                space: SearchSpace::defensible(n),
            },
        }
    }

    #[test]
    fn metric_names() {
        let m: Metric = "share:f2".parse().unwrap();
        assert_eq!(m.kind, MetricKind::Share);
        assert_eq!(m.to_string(), "share:f2");
        assert_eq!(serde_json::to_string(&m).unwrap(), "\"share:f2\"");
        assert!("share".parse::<Metric>().is_err());
        assert!("size:f2".parse::<Metric>().is_err());
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!("rank:1".parse::<Metric>().unwrap().column(&names), Ok(1));
        assert!("rank:c".parse::<Metric>().unwrap().column(&names).is_err());
    }

    #[test]
    fn histogram_counts() {
        let h = dist(vec![0.0, 0.1, 0.5, 0.9, 1.0]).histogram(2).unwrap();
        assert_eq!(h.counts, vec![2, 3]);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
        let flat = dist(vec![2.0; 3]).histogram(4).unwrap();
        assert_eq!(flat.counts, vec![3, 0, 0, 0]);
        assert_eq!(default_bins(50), 7);
    }

    #[test]
    fn csv_one_value_per_line() {
        let mut buf = Vec::new();
        dist(vec![-0.5, 2.0]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value\n-0.5\n2\n");
    }
}
