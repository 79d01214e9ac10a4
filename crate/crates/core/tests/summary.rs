use proptest::collection::vec;
use proptest::prelude::*;
use xhack::shapley::{ShapMatrix, ShapVector};
use xhack::summary::{
    dependence_slope, importance, ols, relative_change, topple_check, ImportanceSummary, SummaryError,
};
use xhack::tabular::{draw_explain_sample, simulate_collinear, split, ExplainSample, SimulationSpec};

fn matrix(rows: Vec<Vec<f64>>) -> ShapMatrix {
    let m = rows[0].len();
    let n = rows.len();
    ShapMatrix {
        rows: rows
            .into_iter()
            .map(|values| {
                let total = values.iter().sum::<f64>();
                ShapVector { values, base_value: 0.5, instance_output: 0.5 + total }
            })
            .collect(),
        feature_names: (0..m).map(|j| format!("f{j}")).collect(),
        sample: ExplainSample { background_rows: vec![], eval_rows: (0..n).collect(), background_size: 0, eval_size: n, seed: 0 },
    }
}

/// Line fit from the 2×2 normal equations in raw sums, solved by Cramer's rule.
fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

#[test]
fn worked_importance() {
    let s = importance(&matrix(vec![vec![1.0, -2.0], vec![-1.0, 2.0]])).unwrap();
    assert_eq!(s.mean_abs, vec![1.0, 2.0]);
    assert!((s.shares[0] - 1.0 / 3.0).abs() < 1e-15 && (s.shares[1] - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(s.ranks, vec![2, 1]);
}

#[test]
fn zero_matrix_is_degenerate() {
    let s = importance(&matrix(vec![vec![0.0, 0.0, 0.0]; 4])).unwrap();
    assert!(s.degenerate);
    assert_eq!(s.shares, vec![0.0; 3]);
}

#[test]
fn single_row() {
    let s = importance(&matrix(vec![vec![0.25, -0.5]])).unwrap();
    assert_eq!(s.mean_abs, vec![0.25, 0.5]);
}

#[test]
fn relative_change_examples() {
    let a = ImportanceSummary::from_mean_abs(vec![1.0, 1.0]);
    let b = ImportanceSummary::from_mean_abs(vec![1.0, 0.0]);
    assert_eq!(relative_change(&a, &a).unwrap(), vec![0.0, 0.0]);
    assert_eq!(relative_change(&a, &b).unwrap(), vec![-0.5, 0.5]);
    let c = ImportanceSummary::from_mean_abs(vec![1.0, 0.0, 2.0]);
    assert_eq!(relative_change(&a, &c), Err(SummaryError::DimensionMismatch(2, 3)));
}

#[test]
fn topple_examples() {
    let s = ImportanceSummary::from_mean_abs(vec![4.0, 3.0, 2.0, 1.0]);
    assert!(!topple_check(&s, 0, 3));
    assert!(topple_check(&s, 3, 3));
    assert!((0..4).all(|j| !topple_check(&s, j, 4)));
    assert!(topple_check(&s, 1, 1));
}

#[test]
fn slope_examples() {
    assert_eq!(ols(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 2.0, 3.0]).unwrap(), (1.0, 0.0));
    assert_eq!(ols(&[0.0, 1.0, 2.0, 3.0], &[0.7; 4]).unwrap(), (0.0, 0.7));
    let (slope, intercept) = ols(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 4.0, 5.0]).unwrap();
    let (s2, i2) = normal_equations(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 4.0, 5.0]);
    assert!((slope - 1.7).abs() < 1e-12 && (intercept - 0.2).abs() < 1e-12);
    assert!((slope - s2).abs() < 1e-12 && (intercept - i2).abs() < 1e-12);
}

#[test]
fn slope_uses_raw_eval_values() {
    let ds = simulate_collinear(&SimulationSpec::new(200, 1.0, 1.0, 5)).unwrap();
    let s = split(&ds, 0.2, 5).unwrap();
    let e = draw_explain_sample(&s, 10, 20, 5).unwrap();
    // SHAP column equal to the feature column.
    let rows = e.eval_rows.iter().map(|&r| s.test.row(r).to_vec()).collect();
    let mut shap = matrix(rows);
    shap.sample = e;
    let (slope, intercept) = dependence_slope(&shap, &s, 1).unwrap();
    assert!((slope - 1.0).abs() < 1e-12 && intercept.abs() < 1e-9);
}

fn shap_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..7).prop_flat_map(|m| vec(vec(-1.0f64..1.0, m), 1..30))
}

proptest! {
    #[test]
    fn ranks_follow_shares(rows in shap_rows()) {
        let s = importance(&matrix(rows)).unwrap();
        let mut ranks = s.ranks.clone();
        ranks.sort_unstable();
        prop_assert_eq!(ranks, (1..=s.n_features()).collect::<Vec<_>>());
        if !s.degenerate {
            prop_assert!((s.shares.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for a in 0..s.n_features() {
            for b in 0..s.n_features() {
                if s.ranks[a] < s.ranks[b] {
                    prop_assert!(s.shares[a] > s.shares[b] || (s.shares[a] == s.shares[b] && a < b));
                }
            }
        }
    }

    #[test]
    fn relative_change_sums_to_zero_and_is_antisymmetric(a in shap_rows(), seed in any::<u64>()) {
        let m = a[0].len();
        let b: Vec<Vec<f64>> = a.iter().enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, v)| v * (((seed >> ((i + j) % 60)) & 7) as f64 + 0.5)).collect())
            .collect();
        let sa = importance(&matrix(a)).unwrap();
        let sb = importance(&matrix(b)).unwrap();
        prop_assume!(!sa.degenerate && !sb.degenerate);
        let ab = relative_change(&sa, &sb).unwrap();
        let ba = relative_change(&sb, &sa).unwrap();
        prop_assert_eq!(ab.len(), m);
        prop_assert!(ab.iter().sum::<f64>().abs() < 1e-9);
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn ols_matches_normal_equations(points in vec((-10.0f64..10.0, -5.0f64..5.0), 2..50)) {
        let (x, y): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let spread = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 1e-3);
        let (s1, i1) = ols(&x, &y).unwrap();
        let (s2, i2) = normal_equations(&x, &y);
        prop_assert!((s1 - s2).abs() < 1e-9 * (1.0 + s1.abs()));
        prop_assert!((i1 - i2).abs() < 1e-9 * (1.0 + i1.abs()));
    }

    #[test]
    fn scale_covariance(rows in shap_rows(), k in -6i32..6, feature in 0usize..2, top in 1usize..3) {
        let c = 2f64.powi(k);
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
        let s = importance(&matrix(rows.clone())).unwrap();
        let t = importance(&matrix(scaled.clone())).unwrap();
        prop_assert_eq!(&s.ranks, &t.ranks);
        prop_assert_eq!(topple_check(&s, feature, top), topple_check(&t, feature, top));
        let x: Vec<f64> = (0..rows.len()).map(|i| i as f64).collect();
        if rows.len() >= 2 {
            let y: Vec<f64> = rows.iter().map(|r| r[feature]).collect();
            let yc: Vec<f64> = scaled.iter().map(|r| r[feature]).collect();
            let (a, _) = ols(&x, &y).unwrap();
            let (b, _) = ols(&x, &yc).unwrap();
            prop_assert_eq!(a * c, b);
        }
    }
}
