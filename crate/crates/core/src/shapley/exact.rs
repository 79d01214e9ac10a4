use ndarray::ArrayView2;

use super::{check_inputs, coalition_values, Predict, Result, ShapError, ShapVector};

/// Largest M accepted by [`exact_shapley`].
pub const EXACT_MAX_FEATURES: usize = 12;

/// Shapley values by direct enumeration of
/// `φ_i = Σ_{S ⊆ F∖{i}} |S|!(M−|S|−1)!/M! · [v(S∪{i}) − v(S)]`.
pub fn exact_shapley<P: Predict + ?Sized>(model: &P, instance: &[f64], background: ArrayView2<'_, f64>) -> Result<ShapVector> {
    check_inputs(instance, background)?;
    let m = instance.len();
    if m > EXACT_MAX_FEATURES {
        return Err(ShapError::TooManyFeatures { m, limit: EXACT_MAX_FEATURES });
    }
    let total = 1usize << m;
    let masks: Vec<Vec<bool>> = (0..total).map(|bits| (0..m).map(|j| bits >> j & 1 == 1).collect()).collect();
    let v = coalition_values(model, instance, background, &masks);

    let fact: Vec<f64> = (0..=m).scan(1.0, |acc, k| {
        if k > 0 {
            *acc *= k as f64;
        }
        Some(*acc)
    }).collect();
    let mut values = vec![0.0; m];
    for (i, phi) in values.iter_mut().enumerate() {
        for s in 0..total {
            if s >> i & 1 == 1 {
                continue;
            }
            let size = s.count_ones() as usize;
            let w = fact[size] * fact[m - size - 1] / fact[m];
            *phi += w * (v[s | 1 << i] - v[s]);
        }
    }
    ShapVector { values, base_value: v[0], instance_output: v[total - 1] }.checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_player() {
        let f = |x: &[f64]| x[0] * 0.1;
        let s = exact_shapley(&f, &[3.0], array![[1.0], [2.0]].view()).unwrap();
        assert_eq!(s.values[0], s.instance_output - s.base_value);
    }

    #[test]
    fn additive_model() {
        let f = |x: &[f64]| x[0] * x[0] + 2.0 * x[1];
        let bg = array![[1.0, 0.0], [3.0, 1.0]];
        let s = exact_shapley(&f, &[2.0, 5.0], bg.view()).unwrap();
        assert!((s.values[0] - (4.0 - 5.0)).abs() < 1e-12);
        assert!((s.values[1] - (10.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn too_many_features() {
        let f = |_: &[f64]| 0.0;
        let bg = ndarray::Array2::zeros((1, 13));
        assert!(matches!(exact_shapley(&f, &[0.0; 13], bg.view()), Err(ShapError::TooManyFeatures { .. })));
    }
}
