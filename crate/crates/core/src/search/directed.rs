use serde::{Deserialize, Serialize};

use super::eval::{Aggregate, EvalResult};
use super::{Result, SearchError};

/// Which model's aggregate magnitude divides the accuracy gap in the
/// default λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaDenominator {
    /// `|X_baseline(v)|`, as in the worked example.
    #[default]
    Baseline,
    /// `|X_best(v)|` of the most accurate model.
    BestByAccuracy,
}

/// Inputs to the scalarized objective
/// `Q = −sgn(X_baseline(v))·λ·X_m(v) + acc(m) − μ·obv(m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedParams {
    pub target_feature: usize,
    /// Defaults to [`lambda_bound`] on the search's own baseline and best model.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub mu: f64,
    /// Defaults to the sign of the baseline's aggregate.
    #[serde(default)]
    pub baseline_sign: Option<i8>,
    #[serde(default)]
    pub signed_aggregate: Aggregate,
    #[serde(default)]
    pub lambda_denominator: LambdaDenominator,
}

impl DirectedParams {
    pub fn new(target_feature: usize) -> Self {
        Self {
            target_feature,
            lambda: None,
            mu: 0.0,
            baseline_sign: None,
            signed_aggregate: Aggregate::Slope,
            lambda_denominator: LambdaDenominator::Baseline,
        }
    }
}

/// [`DirectedParams`] with every default filled in, as used for scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedDirected {
    pub target_feature: usize,
    pub lambda: f64,
    pub mu: f64,
    pub baseline_sign: i8,
    pub signed_aggregate: Aggregate,
}

/// `(perf_best − perf_base) / magnitude`.
///
/// Scores such as 0.9 and 0.7 are decimal fractions that binary floating
/// point cannot hold, so their difference is taken on the shortest decimal
/// forms first; (0.9, 0.7, 1.0) then gives exactly 0.2 instead of
/// 0.20000000000000007.
pub fn lambda_bound(perf_best: f64, perf_base: f64, magnitude: f64) -> Result<f64> {
    if !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(SearchError::Lambda(format!("aggregate magnitude {magnitude} must be positive")));
    }
    if !(perf_best >= perf_base) {
        return Err(SearchError::Lambda(format!("best accuracy {perf_best} is below baseline {perf_base}")));
    }
    Ok(decimal_difference(perf_best, perf_base) / magnitude)
}

fn decimal_difference(a: f64, b: f64) -> f64 {
    match (to_decimal(a), to_decimal(b)) {
        (Some((ma, ea)), Some((mb, eb))) => {
            let e = ea.max(eb);
            let scale = |m: i128, from: u32| m.checked_mul(10i128.checked_pow(e - from)?);
            match (scale(ma, ea), scale(mb, eb)) {
                (Some(x), Some(y)) => (x - y) as f64 / 10f64.powi(e as i32),
                _ => a - b,
            }
        }
        _ => a - b,
    }
}

/// `x = m / 10^e` from the shortest round-trip representation.
fn to_decimal(x: f64) -> Option<(i128, u32)> {
    if !x.is_finite() {
        return None;
    }
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    if frac.len() > 18 {
        return None;
    }
    let digits: i128 = format!("{int}{frac}").parse().ok()?;
    Some((digits, frac.len() as u32))
}

/// `Q` for one candidate. Degenerate candidates and undefined aggregates are
/// errors.
pub fn directed_score(candidate: &EvalResult, params: &ResolvedDirected) -> Result<f64> {
    if candidate.degenerate {
        return Err(SearchError::Undefined { id: candidate.id(), why: "degenerate explanation".into() });
    }
    let x = candidate.aggregate(params.target_feature, params.signed_aggregate).ok_or_else(|| {
        SearchError::Undefined { id: candidate.id(), why: "target aggregate undefined".into() }
    })?;
    Ok(-(params.baseline_sign as f64) * params.lambda * x + candidate.accuracy - params.mu * candidate.obviousness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_lambda() {
        assert_eq!(lambda_bound(0.9, 0.7, 1.0).unwrap(), 0.2);
        assert_eq!(lambda_bound(0.9, 0.7, 0.5).unwrap(), 0.4);
        assert_eq!(lambda_bound(0.8, 0.8, 2.0).unwrap(), 0.0);
        assert!(lambda_bound(0.9, 0.7, 0.0).is_err());
        assert!(lambda_bound(0.6, 0.7, 1.0).is_err());
    }

    #[test]
    fn decimal_parts() {
        assert_eq!(to_decimal(0.9), Some((9, 1)));
        assert_eq!(to_decimal(12.25), Some((1225, 2)));
        assert_eq!(to_decimal(3.0), Some((3, 0)));
        assert_eq!(decimal_difference(0.9, 0.7), 0.2);
        assert_eq!(decimal_difference(0.915, 0.9), 0.015);
        // Long expansions still come back as the nearest double.
        assert_eq!(decimal_difference(1.0 / 3.0, 0.0), 1.0 / 3.0);
    }
}
