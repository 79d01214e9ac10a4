use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureSchema, Result, TabularError};
use crate::rng;

/// How the simulated continuous outcome becomes a class label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TargetRule {
    /// Label 1 when the outcome exceeds its sample median.
    #[default]
    Median,
    Threshold { value: f64 },
}

/// Where the `f1` column comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum F1Source {
    /// `f1 = 10·f0 + noise`: redundant with `f0` and `f2`.
    #[default]
    Derived,
    /// `f1 = 10·u + noise` with `u` an independent Uniform(0,5) draw, so `f1`
    /// carries information no other column has.
    Independent,
}

/// Parameters of the collinear simulation
///
/// ```text
/// f0 ~ Uniform(0, 5)
/// f1 = 10·f0 + N(0, sigma1)
/// f2 = 20·f0 + N(0, sigma2)
/// f3 = 3·f1 + 4·f2 + N(0, 0.01)
/// ```
///
/// with the label derived from `f3` by `target_rule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub n_rows: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    #[serde(default)]
    pub target_rule: TargetRule,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub f1_source: F1Source,
}

fn default_seed() -> u64 {
    crate::DEFAULT_SEED
}

impl SimulationSpec {
    pub fn new(n_rows: usize, sigma1: f64, sigma2: f64, seed: u64) -> Self {
        Self { n_rows, sigma1, sigma2, target_rule: TargetRule::Median, seed, f1_source: F1Source::Derived }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows < 20 {
            return Err(TabularError::InvalidSimulation(format!("n_rows {} < 20", self.n_rows)));
        }
        for (name, s) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !s.is_finite() || s < 0.0 {
                return Err(TabularError::InvalidSimulation(format!("{name} = {s} must be finite and >= 0")));
            }
        }
        if let TargetRule::Threshold { value } = self.target_rule {
            if !value.is_finite() {
                return Err(TabularError::InvalidSimulation("threshold must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::all_numeric(&["f0", "f1", "f2"], "y")
    }
}

const F3_NOISE: f64 = 0.01;

pub fn simulate_collinear(spec: &SimulationSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_rows;
    let mut rng = rng::seeded(spec.seed);
    let mut matrix = Array2::zeros((n, 3));
    let mut f3 = Vec::with_capacity(n);
    for i in 0..n {
        // Fixed draw order per row, so switching `f1_source` leaves f0 and f2
        // untouched for the same seed.
        let f0: f64 = rng.random_range(0.0..5.0);
        let u: f64 = rng.random_range(0.0..5.0);
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let e3: f64 = rng.sample(StandardNormal);
        let parent = match spec.f1_source {
            F1Source::Derived => f0,
            F1Source::Independent => u,
        };
        let f1 = 10.0 * parent + spec.sigma1 * e1;
        let f2 = 20.0 * f0 + spec.sigma2 * e2;
        matrix[[i, 0]] = f0;
        matrix[[i, 1]] = f1;
        matrix[[i, 2]] = f2;
        f3.push(3.0 * f1 + 4.0 * f2 + F3_NOISE * e3);
    }
    let threshold = match spec.target_rule {
        TargetRule::Median => median(&f3),
        TargetRule::Threshold { value } => value,
    };
    let target = f3.iter().map(|&v| u8::from(v > threshold)).collect();
    let tag = format!(
        "simulated:collinear(n={},sigma1={},sigma2={},seed={},f1={:?})",
        spec.n_rows, spec.sigma1, spec.sigma2, spec.seed, spec.f1_source
    );
    Dataset::from_numeric(matrix, target, vec!["f0".into(), "f1".into(), "f2".into()], tag)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    fn col(ds: &Dataset, j: usize) -> Vec<f64> {
        ds.matrix().column(j).to_vec()
    }

    #[test]
    fn noiseless_columns_are_collinear() {
        let ds = simulate_collinear(&SimulationSpec::new(200, 0.0, 0.0, 42)).unwrap();
        let (f1, f2) = (col(&ds, 1), col(&ds, 2));
        for (a, b) in f1.iter().zip(&f2) {
            assert!((b - 2.0 * a).abs() < 1e-9);
        }
        assert!((pearson(&f1, &f2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_target_tracks_f0_median() {
        let ds = simulate_collinear(&SimulationSpec::new(500, 0.0, 0.0, 42)).unwrap();
        let f0 = col(&ds, 0);
        let m = median(&f0);
        let agree = f0.iter().zip(ds.target()).filter(|(x, &t)| u8::from(**x > m) == t).count();
        // Only rows within the 0.01 outcome noise of the cut can disagree.
        assert!(agree >= 498, "{agree}");
        assert_eq!(ds.class_counts(), [250, 250]);
    }

    #[test]
    fn noisy_correlation_is_strictly_inside_unit_interval() {
        let ds = simulate_collinear(&SimulationSpec::new(1000, 5.0, 5.0, 42)).unwrap();
        let r = pearson(&col(&ds, 1), &col(&ds, 2));
        assert!(r > 0.0 && r < 1.0, "{r}");
    }

    #[test]
    fn independent_f1_keeps_other_columns() {
        let base = SimulationSpec::new(100, 0.1, 0.1, 9);
        let indep = SimulationSpec { f1_source: F1Source::Independent, ..base.clone() };
        let a = simulate_collinear(&base).unwrap();
        let b = simulate_collinear(&indep).unwrap();
        assert_eq!(col(&a, 0), col(&b, 0));
        assert_eq!(col(&a, 2), col(&b, 2));
        assert!(pearson(&col(&b, 0), &col(&b, 1)).abs() < 0.3);
    }

    #[test]
    fn bit_identical_per_seed() {
        let spec = SimulationSpec::new(300, 1.0, 2.0, 7);
        let a = simulate_collinear(&spec).unwrap();
        let b = simulate_collinear(&spec).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn validation() {
        assert!(simulate_collinear(&SimulationSpec::new(19, 0.0, 0.0, 1)).is_err());
        assert!(simulate_collinear(&SimulationSpec::new(50, -1.0, 0.0, 1)).is_err());
        assert!(simulate_collinear(&SimulationSpec::new(50, 0.0, f64::NAN, 1)).is_err());
    }

    #[test]
    fn spec_json_defaults() {
        let spec: SimulationSpec = serde_json::from_str(r#"{"n_rows":100,"sigma1":0,"sigma2":0}"#).unwrap();
        assert_eq!(spec.seed, 42);
        assert_eq!(spec.target_rule, TargetRule::Median);
        assert_eq!(spec.f1_source, F1Source::Derived);
    }
}
