use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::params::{resolve_params, Family, HyperValue, Preprocess};
use super::Result;

/// One point of the pipeline search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub id: u64,
    pub preprocess: Preprocess,
    pub family: Family,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, HyperValue>,
    pub seed: u64,
}

/// Config id reserved for the baseline model.
pub const BASELINE_ID: u64 = 0;

impl PipelineConfig {
    /// A config of `family` with every hyperparameter at its default.
    pub fn new(id: u64, family: Family, preprocess: Preprocess, seed: u64) -> Self {
        Self { id, preprocess, family, hyperparameters: family.defaults(), seed }
    }

    /// The default random forest without preprocessing.
    pub fn baseline(seed: u64) -> Self {
        Self::new(BASELINE_ID, Family::RandomForest, Preprocess::None, seed)
    }

    pub fn with(mut self, name: &str, value: HyperValue) -> Self {
        self.hyperparameters.insert(name.to_string(), value);
        self
    }

    /// Hyperparameters validated against the family schema, defaults filled in.
    pub fn resolved(&self) -> Result<BTreeMap<String, HyperValue>> {
        resolve_params(self.family, &self.hyperparameters)
    }

    pub fn describe(&self) -> String {
        let params: Vec<String> = self.hyperparameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("#{} {}+{} [{}]", self.id, self.preprocess.name(), self.family, params.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_is_default_forest() {
        let b = PipelineConfig::baseline(42);
        assert_eq!(b.family, Family::RandomForest);
        assert_eq!(b.preprocess, Preprocess::None);
        assert_eq!(b.id, BASELINE_ID);
        assert_eq!(b.seed, 42);
        assert_eq!(b.hyperparameters["n_trees"], HyperValue::Int(100));
        assert_eq!(b.hyperparameters["max_depth"], HyperValue::Int(0));
        assert_eq!(b.hyperparameters["max_features"], HyperValue::Cat("sqrt".into()));
    }

    #[test]
    fn json_round_trip() {
        let c = PipelineConfig::new(7, Family::GradientBoostedTrees, Preprocess::MinMax, 3)
            .with("learning_rate", HyperValue::Real(0.25));
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"gradient-boosted-trees\""));
        assert!(text.contains("\"min-max\""));
        let back: PipelineConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
