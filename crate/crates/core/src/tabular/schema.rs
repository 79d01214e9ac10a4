use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Result, TabularError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: FeatureKind::Numeric }
    }

    pub fn categorical(name: impl Into<String>, levels: &[&str]) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical { levels: levels.iter().map(|s| s.to_string()).collect() },
        }
    }
}

/// Column layout of a CSV file.
///
/// `target_levels`, when present, names the negative and positive target
/// labels in that order; otherwise the target column must hold `0` or `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<FeatureSpec>,
    #[serde(alias = "target")]
    pub target_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_levels: Option<[String; 2]>,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>, target_name: impl Into<String>) -> Result<Self> {
        let schema = Self { features, target_name: target_name.into(), target_levels: None };
        schema.validate()?;
        Ok(schema)
    }

    pub fn all_numeric<S: AsRef<str>>(names: &[S], target_name: &str) -> Self {
        Self {
            features: names.iter().map(|n| FeatureSpec::numeric(n.as_ref())).collect(),
            target_name: target_name.to_string(),
            target_levels: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let schema: Self = serde_json::from_str(&text)
            .map_err(|e| TabularError::InvalidSchema(format!("{}: {e}", path.display())))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(TabularError::InvalidSchema("no features".into()));
        }
        let mut seen = BTreeSet::new();
        for f in &self.features {
            if !seen.insert(f.name.as_str()) {
                return Err(TabularError::InvalidSchema(format!("duplicate feature `{}`", f.name)));
            }
            if let FeatureKind::Categorical { levels } = &f.kind {
                if levels.len() < 2 {
                    return Err(TabularError::InvalidSchema(format!(
                        "categorical feature `{}` needs at least 2 levels",
                        f.name
                    )));
                }
                let distinct: BTreeSet<_> = levels.iter().collect();
                if distinct.len() != levels.len() {
                    return Err(TabularError::InvalidSchema(format!(
                        "categorical feature `{}` repeats a level",
                        f.name
                    )));
                }
            }
        }
        if seen.contains(self.target_name.as_str()) {
            return Err(TabularError::InvalidSchema(format!(
                "target `{}` is also listed as a feature",
                self.target_name
            )));
        }
        if let Some([neg, pos]) = &self.target_levels {
            if neg == pos {
                return Err(TabularError::InvalidSchema("target levels must differ".into()));
            }
        }
        Ok(())
    }

    /// Maps a raw target cell to 0 or 1.
    pub(crate) fn parse_target(&self, raw: &str) -> Option<u8> {
        match &self.target_levels {
            Some([neg, pos]) if raw == neg => Some(0),
            Some([_, pos]) if raw == pos => Some(1),
            Some(_) => None,
            None => match raw.parse::<f64>() {
                Ok(v) if v == 0.0 => Some(0),
                Ok(v) if v == 1.0 => Some(1),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let json = r#"{"features":[{"name":"age","kind":"numeric"},
            {"name":"sex","kind":"categorical","levels":["f","m"]}],"target":"y"}"#;
        let s: FeatureSchema = serde_json::from_str(json).unwrap();
        s.validate().unwrap();
        assert_eq!(s.features[1], FeatureSpec::categorical("sex", &["f", "m"]));
        assert_eq!(s.target_name, "y");
    }

    #[test]
    fn rejects_bad_schemas() {
        let dup = FeatureSchema::new(vec![FeatureSpec::numeric("a"), FeatureSpec::numeric("a")], "y");
        assert!(dup.is_err());
        let one_level = FeatureSchema::new(vec![FeatureSpec::categorical("c", &["x"])], "y");
        assert!(one_level.is_err());
        let target_clash = FeatureSchema::new(vec![FeatureSpec::numeric("y")], "y");
        assert!(target_clash.is_err());
    }

    #[test]
    fn target_parsing() {
        let mut s = FeatureSchema::all_numeric(&["a"], "y");
        assert_eq!(s.parse_target("1"), Some(1));
        assert_eq!(s.parse_target("0.0"), Some(0));
        assert_eq!(s.parse_target("2"), None);
        s.target_levels = Some(["no".into(), "yes".into()]);
        assert_eq!(s.parse_target("yes"), Some(1));
        assert_eq!(s.parse_target("1"), None);
    }
}
