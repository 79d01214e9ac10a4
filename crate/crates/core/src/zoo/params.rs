//! Model families, their hyperparameter schemas, and search ranges.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Result, ZooError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    DecisionTree,
    RandomForest,
    GradientBoostedTrees,
    LogisticRegression,
    KNearestNeighbours,
    GaussianNaiveBayes,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::DecisionTree,
        Family::RandomForest,
        Family::GradientBoostedTrees,
        Family::LogisticRegression,
        Family::KNearestNeighbours,
        Family::GaussianNaiveBayes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::DecisionTree => "decision-tree",
            Family::RandomForest => "random-forest",
            Family::GradientBoostedTrees => "gradient-boosted-trees",
            Family::LogisticRegression => "logistic-regression",
            Family::KNearestNeighbours => "k-nearest-neighbours",
            Family::GaussianNaiveBayes => "gaussian-naive-bayes",
        }
    }

    /// Declared hyperparameters, in a fixed order.
    pub fn schema(self) -> Vec<ParamSpec> {
        use HyperValue::{Cat, Int, Real};
        let int = |lo, hi| ParamRange::Int { lo, hi };
        let real = |lo, hi, log| ParamRange::Real { lo, hi, log };
        let choice = |v: &[&str]| ParamRange::Choice { values: v.iter().map(|s| s.to_string()).collect() };
        let spec = |name, domain, search, default| ParamSpec { name, domain, search, default };
        match self {
            Family::DecisionTree => vec![
                // 0 means unlimited depth.
                spec("max_depth", int(0, 20), int(1, 20), Int(0)),
                spec("min_samples_leaf", int(1, 100), int(1, 20), Int(1)),
                spec("criterion", choice(&["gini", "entropy"]), choice(&["gini", "entropy"]), Cat("gini".into())),
            ],
            Family::RandomForest => vec![
                spec("n_trees", int(1, 500), int(10, 200), Int(100)),
                spec("max_depth", int(0, 20), int(0, 20), Int(0)),
                spec(
                    "max_features",
                    choice(&["sqrt", "log2", "all"]),
                    choice(&["sqrt", "log2", "all"]),
                    Cat("sqrt".into()),
                ),
            ],
            Family::GradientBoostedTrees => vec![
                spec("n_rounds", int(1, 1000), int(10, 200), Int(100)),
                spec("learning_rate", real(1e-4, 1.0, true), real(0.01, 0.5, true), Real(0.1)),
                spec("max_depth", int(1, 10), int(1, 6), Int(3)),
            ],
            Family::LogisticRegression => {
                vec![spec("l2", real(1e-8, 1e4, true), real(1e-4, 1e2, true), Real(1.0))]
            }
            Family::KNearestNeighbours => vec![
                spec("k", int(1, 1000), int(1, 50), Int(5)),
                spec("weights", choice(&["uniform", "distance"]), choice(&["uniform", "distance"]), Cat("uniform".into())),
            ],
            Family::GaussianNaiveBayes => {
                vec![spec("var_smoothing", real(1e-15, 1.0, true), real(1e-12, 1e-3, true), Real(1e-9))]
            }
        }
    }

    pub fn defaults(self) -> BTreeMap<String, HyperValue> {
        self.schema().into_iter().map(|p| (p.name.to_string(), p.default)).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Preprocess {
    #[default]
    None,
    Standardize,
    MinMax,
}

impl Preprocess {
    pub const ALL: [Preprocess; 3] = [Preprocess::None, Preprocess::Standardize, Preprocess::MinMax];

    pub fn name(self) -> &'static str {
        match self {
            Preprocess::None => "none",
            Preprocess::Standardize => "standardize",
            Preprocess::MinMax => "min-max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperValue {
    Int(i64),
    Real(f64),
    Cat(String),
}

impl HyperValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            HyperValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            HyperValue::Real(v) => Some(*v),
            HyperValue::Int(v) => Some(*v as f64),
            HyperValue::Cat(_) => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            HyperValue::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for HyperValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperValue::Int(v) => write!(f, "{v}"),
            HyperValue::Real(v) => write!(f, "{v}"),
            HyperValue::Cat(s) => f.write_str(s),
        }
    }
}

/// A set of admissible values for one hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamRange {
    Int { lo: i64, hi: i64 },
    Real { lo: f64, hi: f64, #[serde(default)] log: bool },
    Choice { values: Vec<String> },
    Fixed { value: HyperValue },
}

impl ParamRange {
    pub fn contains(&self, value: &HyperValue) -> bool {
        match (self, value) {
            (ParamRange::Int { lo, hi }, HyperValue::Int(v)) => lo <= v && v <= hi,
            (ParamRange::Real { lo, hi, .. }, v) => v.as_real().is_some_and(|v| *lo <= v && v <= *hi),
            (ParamRange::Choice { values }, HyperValue::Cat(s)) => values.iter().any(|c| c == s),
            (ParamRange::Fixed { value: fixed }, v) => fixed == v,
            _ => false,
        }
    }

    /// True when every value of `self` is admissible under `domain`.
    pub fn within(&self, domain: &ParamRange) -> bool {
        match self {
            ParamRange::Int { lo, hi } => {
                lo <= hi && domain.contains(&HyperValue::Int(*lo)) && domain.contains(&HyperValue::Int(*hi))
            }
            ParamRange::Real { lo, hi, log } => {
                lo <= hi
                    && (!log || *lo > 0.0)
                    && domain.contains(&HyperValue::Real(*lo))
                    && domain.contains(&HyperValue::Real(*hi))
            }
            ParamRange::Choice { values } => {
                !values.is_empty() && values.iter().all(|v| domain.contains(&HyperValue::Cat(v.clone())))
            }
            ParamRange::Fixed { value } => domain.contains(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    /// Values the trainer accepts.
    pub domain: ParamRange,
    /// Values a search draws from unless the search space overrides it.
    pub search: ParamRange,
    pub default: HyperValue,
}

/// Checks `params` against the family schema and fills in defaults.
pub fn resolve_params(
    family: Family,
    params: &BTreeMap<String, HyperValue>,
) -> Result<BTreeMap<String, HyperValue>> {
    let schema = family.schema();
    if let Some(unknown) = params.keys().find(|k| !schema.iter().any(|p| p.name == k.as_str())) {
        return Err(ZooError::InvalidHyperparameter(format!("{family} has no hyperparameter `{unknown}`")));
    }
    let mut out = BTreeMap::new();
    for spec in schema {
        let value = params.get(spec.name).cloned().unwrap_or(spec.default);
        // Integers given where reals are declared are accepted and widened.
        let value = match (&spec.domain, value) {
            (ParamRange::Real { .. }, HyperValue::Int(v)) => HyperValue::Real(v as f64),
            (_, v) => v,
        };
        if !spec.domain.contains(&value) {
            return Err(ZooError::InvalidHyperparameter(format!(
                "{family}.{} = {value} outside {:?}",
                spec.name, spec.domain
            )));
        }
        out.insert(spec.name.to_string(), value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_in_domain() {
        for family in Family::ALL {
            for p in family.schema() {
                assert!(p.domain.contains(&p.default), "{family}.{}", p.name);
                assert!(p.search.within(&p.domain), "{family}.{}", p.name);
            }
        }
    }

    #[test]
    fn resolve_fills_and_checks() {
        let r = resolve_params(Family::KNearestNeighbours, &BTreeMap::new()).unwrap();
        assert_eq!(r["k"], HyperValue::Int(5));
        let mut bad = BTreeMap::new();
        bad.insert("k".into(), HyperValue::Int(0));
        assert!(resolve_params(Family::KNearestNeighbours, &bad).is_err());
        let mut unknown = BTreeMap::new();
        unknown.insert("depth".into(), HyperValue::Int(3));
        assert!(resolve_params(Family::KNearestNeighbours, &unknown).is_err());
        let mut widened = BTreeMap::new();
        widened.insert("l2".into(), HyperValue::Int(1));
        let r = resolve_params(Family::LogisticRegression, &widened).unwrap();
        assert_eq!(r["l2"], HyperValue::Real(1.0));
    }

    #[test]
    fn hypervalue_json() {
        let v: HyperValue = serde_json::from_str("3").unwrap();
        assert_eq!(v, HyperValue::Int(3));
        let v: HyperValue = serde_json::from_str("0.5").unwrap();
        assert_eq!(v, HyperValue::Real(0.5));
        let v: HyperValue = serde_json::from_str("\"gini\"").unwrap();
        assert_eq!(v, HyperValue::Cat("gini".into()));
        assert_eq!(serde_json::to_string(&HyperValue::Real(1.0)).unwrap(), "1.0");
    }

    #[test]
    fn range_within_domain() {
        let domain = ParamRange::Int { lo: 0, hi: 20 };
        assert!(ParamRange::Int { lo: 3, hi: 3 }.within(&domain));
        assert!(!ParamRange::Int { lo: 3, hi: 30 }.within(&domain));
        assert!(!ParamRange::Int { lo: 5, hi: 3 }.within(&domain));
    }
}
