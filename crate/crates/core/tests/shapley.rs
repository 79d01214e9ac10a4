use ndarray::{array, Array2};
use proptest::prelude::*;
use rand::Rng as _;
use xhack::rng;
use xhack::shapley::{exact_shapley, explain_set, kernel_shap, ExplainerConfig, ShapVector};
use xhack::tabular::{draw_explain_sample, simulate_collinear, split, SimulationSpec};
use xhack::zoo::{train, Family, HyperValue, PipelineConfig, Preprocess};

/// A smooth nonlinear model with pairwise interactions and a kink,
/// squashed into (0, 1).
struct RandomModel {
    w: Vec<f64>,
    u: Vec<(usize, usize, f64)>,
    kink: (usize, f64, f64),
}

impl RandomModel {
    fn new(m: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        let w = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
        let u = (0..m)
            .map(|_| (r.random_range(0..m), r.random_range(0..m), r.random_range(-1.0..1.0)))
            .collect();
        let kink = (r.random_range(0..m), r.random_range(-1.0..1.0), r.random_range(-3.0..3.0));
        Self { w, u, kink }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut z: f64 = self.w.iter().zip(x).map(|(w, x)| w * x).sum();
        z += self.u.iter().map(|&(i, j, c)| c * x[i] * x[j]).sum::<f64>();
        z += self.kink.2 * (x[self.kink.0] - self.kink.1).max(0.0);
        1.0 / (1.0 + (-z).exp())
    }
}

fn random_matrix(rows: usize, m: usize, seed: u64) -> Array2<f64> {
    let mut r = rng::seeded(seed);
    Array2::from_shape_fn((rows, m), |_| r.random_range(-2.0..2.0))
}

/// Shapley values by averaging marginal contributions over all M! orderings.
fn permutation_oracle(f: &dyn Fn(&[f64]) -> f64, x: &[f64], bg: &Array2<f64>) -> Vec<f64> {
    let m = x.len();
    let v = |mask: &[bool]| {
        let mut total = 0.0;
        for b in bg.rows() {
            let row: Vec<f64> = (0..m).map(|j| if mask[j] { x[j] } else { b[j] }).collect();
            total += f(&row);
        }
        total / bg.nrows() as f64
    };
    let mut perm: Vec<usize> = (0..m).collect();
    let mut phi = vec![0.0; m];
    let mut count = 0.0;
    loop {
        let mut mask = vec![false; m];
        let mut prev = v(&mask);
        for &i in &perm {
            mask[i] = true;
            let cur = v(&mask);
            phi[i] += cur - prev;
            prev = cur;
        }
        count += 1.0;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    phi.iter().map(|p| p / count).collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn linear_model_closed_form() {
    let w = [0.3, -1.2, 0.05, 2.0];
    let f = |x: &[f64]| w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>();
    let bg = random_matrix(7, 4, 1);
    let x = [1.0, -0.5, 3.0, 0.25];
    let kernel = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::exact()).unwrap();
    let exact = exact_shapley(&f, &x, bg.view()).unwrap();
    for j in 0..4 {
        let mean = bg.column(j).sum() / 7.0;
        let expected = w[j] * (x[j] - mean);
        assert!((kernel.values[j] - expected).abs() < 1e-9);
        assert!((exact.values[j] - expected).abs() < 1e-9);
    }
}

#[test]
fn exact_matches_permutation_oracle() {
    for seed in 0..5 {
        let model = RandomModel::new(5, seed);
        let f = |x: &[f64]| model.eval(x);
        let bg = random_matrix(4, 5, seed + 100);
        let x = random_matrix(1, 5, seed + 200).row(0).to_vec();
        let exact = exact_shapley(&f, &x, bg.view()).unwrap();
        let oracle = permutation_oracle(&f, &x, &bg);
        assert!(max_diff(&exact.values, &oracle) < 1e-12, "seed {seed}");
    }
}

#[test]
fn tree_model_kernel_matches_exact() {
    let x = random_matrix(200, 4, 9);
    let y: Vec<u8> = x.rows().into_iter().map(|r| (r[0] * r[1] + r[2] > 0.0) as u8).collect();
    let names = (0..4).map(|j| format!("x{j}")).collect();
    let ds = xhack::tabular::Dataset::from_numeric(x, y, names, "t").unwrap();
    let c = PipelineConfig::new(1, Family::DecisionTree, Preprocess::None, 0).with("max_depth", HyperValue::Int(5));
    let model = train(&c, &ds).unwrap();
    let bg = random_matrix(5, 4, 10);
    for i in 0..10 {
        let inst = ds.row(i).to_vec();
        let k = kernel_shap(&model, &inst, bg.view(), &ExplainerConfig::exact()).unwrap();
        let e = exact_shapley(&model, &inst, bg.view()).unwrap();
        assert!(max_diff(&k.values, &e.values) < 1e-6);
    }
}

#[test]
fn sampled_error_shrinks_as_budget_doubles() {
    let m = 10;
    let model = RandomModel::new(m, 77);
    let f = |x: &[f64]| model.eval(x);
    let bg = random_matrix(8, m, 78);
    let x = random_matrix(1, m, 79).row(0).to_vec();
    let exact = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::exact()).unwrap();
    let mut last = f64::INFINITY;
    for budget in [40, 80, 160, 320, 640] {
        let mut errors: Vec<f64> = (0..20)
            .map(|t| {
                let s = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::sampled(budget, t)).unwrap();
                s.values.iter().zip(&exact.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            })
            .collect();
        errors.sort_by(f64::total_cmp);
        let median = (errors[9] + errors[10]) / 2.0;
        assert!(median < last, "budget {budget}: median error {median} vs {last}");
        last = median;
    }
}

#[test]
fn large_budget_falls_back_to_enumeration() {
    let model = RandomModel::new(4, 3);
    let f = |x: &[f64]| model.eval(x);
    let bg = random_matrix(3, 4, 4);
    let x = [0.1, 0.2, 0.3, 0.4];
    let exact = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::exact()).unwrap();
    let sampled = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::sampled(14, 5)).unwrap();
    assert_eq!(exact, sampled);
}

#[test]
fn duplicated_columns_get_equal_shares() {
    let f = |x: &[f64]| (x[0] + x[1]).tanh() * 0.5 + 0.5;
    let bg = array![[0.0, 0.0, 1.0], [-1.0, -1.0, 2.0]];
    let s = kernel_shap(&f, &[1.0, 1.0, 0.0], bg.view(), &ExplainerConfig::exact()).unwrap();
    assert!((s.values[0] - s.values[1]).abs() < 1e-6);
    assert!(s.values[2].abs() < 1e-12);
}

fn simulated() -> (xhack::tabular::SplitDataset, xhack::tabular::ExplainSample) {
    let ds = simulate_collinear(&SimulationSpec::new(1000, 0.1, 0.1, 42)).unwrap();
    let s = split(&ds, 0.2, 42).unwrap();
    let e = draw_explain_sample(&s, 50, 100, 42).unwrap();
    (s, e)
}

#[test]
fn explain_set_shape_and_schedule_independence() {
    let (s, e) = simulated();
    let c = PipelineConfig::new(1, Family::GradientBoostedTrees, Preprocess::None, 42)
        .with("n_rounds", HyperValue::Int(30));
    let model = train(&c, &s.train).unwrap();
    let cfg = ExplainerConfig::sampled(6, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| explain_set(&model, &s, &e, &cfg).unwrap())
    };
    let serial = run(1);
    assert_eq!(serial.n_rows(), 100);
    assert_eq!(serial, run(4));
}

#[test]
fn constant_model_gives_zero_matrix() {
    let (s, e) = simulated();
    // With every column constant the tree cannot split and predicts the prevalence.
    let flat = (0..3).fold(s.train.clone(), |d, j| d.with_column(j, &vec![1.0; d.n_rows()]).unwrap());
    let model = train(&PipelineConfig::new(1, Family::DecisionTree, Preprocess::None, 0), &flat).unwrap();
    let m = explain_set(&model, &s, &e, &ExplainerConfig::exact()).unwrap();
    assert!(m.values().iter().all(|&v| v == 0.0));
}

#[test]
fn ignored_column_gets_zero() {
    let (s, e) = simulated();
    let c = PipelineConfig::new(1, Family::DecisionTree, Preprocess::None, 0).with("max_depth", HyperValue::Int(1));
    let model = train(&c, &s.train).unwrap();
    let used = match model.model {
        xhack::zoo::FittedModel::DecisionTree(ref t) => match t.nodes[0] {
            xhack::zoo::TreeNode::Split { feature, .. } => feature,
            _ => unreachable!(),
        },
        _ => unreachable!(),
    };
    let m = explain_set(&model, &s, &e, &ExplainerConfig::exact()).unwrap();
    for j in (0..3).filter(|&j| j != used) {
        assert!(m.column(j).iter().all(|v| v.abs() < 1e-9));
    }
}

fn efficient(s: &ShapVector) -> bool {
    s.efficiency_gap() <= 1e-6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_exact_equals_enumeration(m in 1usize..=8, seed in any::<u64>(), n_bg in 1usize..6) {
        let model = RandomModel::new(m, seed);
        let f = |x: &[f64]| model.eval(x);
        let bg = random_matrix(n_bg, m, seed ^ 1);
        let x = random_matrix(1, m, seed ^ 2).row(0).to_vec();
        let k = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::exact()).unwrap();
        let e = exact_shapley(&f, &x, bg.view()).unwrap();
        prop_assert!(max_diff(&k.values, &e.values) < 1e-6);
        prop_assert!(efficient(&k) && efficient(&e));
    }

    #[test]
    fn sampled_vectors_are_efficient(m in 2usize..=12, seed in any::<u64>(), extra in 0usize..40) {
        let model = RandomModel::new(m, seed);
        let f = |x: &[f64]| model.eval(x);
        let bg = random_matrix(3, m, seed ^ 3);
        let x = random_matrix(1, m, seed ^ 4).row(0).to_vec();
        let s = kernel_shap(&f, &x, bg.view(), &ExplainerConfig::sampled(2 * m + extra, seed)).unwrap();
        prop_assert!(efficient(&s));
        prop_assert_eq!(s.values.len(), m);
    }

    #[test]
    fn exchangeable_features_share_equally(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut r = rng::seeded(seed);
        let (c0, c1) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let f = move |x: &[f64]| 1.0 / (1.0 + (-(c0 * (x[0] + x[1]) + c1 * x[0] * x[1] + x[2])).exp());
        let bg = random_matrix(4, 3, seed);
        let bg = Array2::from_shape_fn((4, 3), |(i, j)| if j == 1 { bg[[i, 0]] } else { bg[[i, j]] });
        let s = kernel_shap(&f, &[a, a, b], bg.view(), &ExplainerConfig::exact()).unwrap();
        prop_assert!((s.values[0] - s.values[1]).abs() < 1e-6);
    }
}
