use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Result, SearchError};
use crate::rng;
use crate::zoo::{Family, HyperValue, ParamRange, PipelineConfig, Preprocess};

/// The declared space a search draws pipelines from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub families: Vec<Family>,
    /// Per-family overrides of the default search ranges.
    #[serde(default)]
    pub ranges: BTreeMap<Family, BTreeMap<String, ParamRange>>,
    #[serde(default = "all_preprocess")]
    pub preprocess: Vec<Preprocess>,
    /// Number of configurations drawn.
    pub budget: usize,
    /// Candidates whose training takes longer are recorded as failed.
    #[serde(default)]
    pub per_config_time_limit: Option<f64>,
}

fn all_preprocess() -> Vec<Preprocess> {
    Preprocess::ALL.to_vec()
}

impl SearchSpace {
    /// Every family and preprocessing option at its default search ranges.
    pub fn defensible(budget: usize) -> Self {
        Self {
            families: Family::ALL.to_vec(),
            ranges: BTreeMap::new(),
            preprocess: all_preprocess(),
            budget,
            per_config_time_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(SearchError::InvalidSpace("family list is empty".into()));
        }
        if self.preprocess.is_empty() {
            return Err(SearchError::InvalidSpace("preprocess list is empty".into()));
        }
        if self.budget == 0 {
            return Err(SearchError::InvalidSpace("budget must be at least 1".into()));
        }
        if let Some(t) = self.per_config_time_limit {
            if !(t > 0.0) {
                return Err(SearchError::InvalidSpace(format!("time limit {t} must be positive")));
            }
        }
        for (family, overrides) in &self.ranges {
            let schema = family.schema();
            for (name, range) in overrides {
                let spec = schema.iter().find(|p| p.name == name).ok_or_else(|| {
                    SearchError::InvalidSpace(format!("{family} has no hyperparameter `{name}`"))
                })?;
                if !range.within(&spec.domain) {
                    return Err(SearchError::InvalidSpace(format!("{family}.{name}: {range:?} outside {:?}", spec.domain)));
                }
            }
        }
        Ok(())
    }

    /// Effective range of every hyperparameter of `family`, in schema order.
    pub fn ranges_for(&self, family: Family) -> Vec<(&'static str, ParamRange)> {
        let overrides = self.ranges.get(&family);
        family
            .schema()
            .into_iter()
            .map(|p| (p.name, overrides.and_then(|o| o.get(p.name)).cloned().unwrap_or(p.search)))
            .collect()
    }
}

/// `space.budget` configs with ids `1..=budget`.
///
/// Families and preprocessing are drawn uniformly, then each hyperparameter
/// uniformly over its range (log-uniformly where declared). Each config gets
/// its own derived training seed.
pub fn sample_configs(space: &SearchSpace, seed: u64) -> Result<Vec<PipelineConfig>> {
    space.validate()?;
    let mut r = rng::seeded(seed);
    let mut out = Vec::with_capacity(space.budget);
    for id in 1..=space.budget as u64 {
        let family = space.families[r.random_range(0..space.families.len())];
        let preprocess = space.preprocess[r.random_range(0..space.preprocess.len())];
        let mut config = PipelineConfig::new(id, family, preprocess, rng::derive_seed(seed, id));
        for (name, range) in space.ranges_for(family) {
            config.hyperparameters.insert(name.to_string(), draw(&range, &mut r));
        }
        out.push(config);
    }
    Ok(out)
}

fn draw(range: &ParamRange, r: &mut rng::Rng) -> HyperValue {
    match range {
        ParamRange::Int { lo, hi } => HyperValue::Int(r.random_range(*lo..=*hi)),
        ParamRange::Real { lo, hi, log: true } => HyperValue::Real(r.random_range(lo.ln()..=hi.ln()).exp().clamp(*lo, *hi)),
        ParamRange::Real { lo, hi, log: false } => HyperValue::Real(r.random_range(*lo..=*hi)),
        ParamRange::Choice { values } => HyperValue::Cat(values[r.random_range(0..values.len())].clone()),
        ParamRange::Fixed { value } => value.clone(),
    }
}

/// Fraction of the family's hyperparameters that differ from their defaults.
///
/// A stand-in for how conspicuous a configuration would look to a reviewer;
/// preprocessing is not counted.
pub fn obviousness(config: &PipelineConfig) -> f64 {
    let schema = config.family.schema();
    if schema.is_empty() {
        return 0.0;
    }
    let changed = schema
        .iter()
        .filter(|p| config.hyperparameters.get(p.name).is_some_and(|v| !same_value(v, &p.default)))
        .count();
    changed as f64 / schema.len() as f64
}

fn same_value(a: &HyperValue, b: &HyperValue) -> bool {
    match (a, b) {
        (HyperValue::Cat(x), HyperValue::Cat(y)) => x == y,
        _ => a.as_real().zip(b.as_real()).is_some_and(|(x, y)| x == y),
    }
}
