use serde::{Deserialize, Serialize};

use super::eval::{Aggregate, EvalResult};

/// Front index of every point: 0 for points nobody dominates, `i` for points
/// whose dominators all sit in fronts `< i`, at least one of them in `i − 1`.
///
/// `a` dominates `b` when it is at least as good in every objective and
/// strictly better in one, with "better" per `maximize`.
pub fn non_dominated_sort(points: &[Vec<f64>], maximize: &[bool]) -> Vec<usize> {
    let n = points.len();
    let dominates = |a: &[f64], b: &[f64]| {
        let mut strict = false;
        for ((&x, &y), &max) in a.iter().zip(b).zip(maximize) {
            let (x, y) = if max { (x, y) } else { (-x, -y) };
            if x < y {
                return false;
            }
            if x > y {
                strict = true;
            }
        }
        strict
    };
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&points[i], &points[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut front: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut level = 0;
    while !front.is_empty() {
        let mut next = Vec::new();
        for &i in &front {
            rank[i] = level;
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        front = next;
        level += 1;
    }
    rank
}

/// Whether the attacker wants the aggregate high or low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// The direction that flips a baseline of sign `baseline_sign`.
    pub fn against(baseline_sign: i8) -> Self {
        if baseline_sign > 0 {
            Sense::Minimize
        } else {
            Sense::Maximize
        }
    }
}

/// One evaluated pipeline placed in (accuracy, aggregate) space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub config_id: u64,
    pub accuracy: f64,
    pub aggregate: f64,
    pub rank: usize,
}

/// All pipelines with a defined aggregate, ranked on
/// (accuracy ↑, aggregate in direction `sense`), sorted by rank then id.
pub fn pareto_points<'a>(
    evals: impl IntoIterator<Item = &'a EvalResult>,
    feature: usize,
    aggregate: Aggregate,
    sense: Sense,
) -> Vec<ParetoPoint> {
    let usable: Vec<(u64, f64, f64)> = evals
        .into_iter()
        .filter_map(|e| e.aggregate(feature, aggregate).map(|x| (e.id(), e.accuracy, x)))
        .collect();
    let objectives: Vec<Vec<f64>> = usable.iter().map(|&(_, acc, x)| vec![acc, x]).collect();
    let ranks = non_dominated_sort(&objectives, &[true, sense == Sense::Maximize]);
    let mut points: Vec<ParetoPoint> = usable
        .iter()
        .zip(ranks)
        .map(|(&(config_id, accuracy, aggregate), rank)| ParetoPoint { config_id, accuracy, aggregate, rank })
        .collect();
    points.sort_by_key(|p| (p.rank, p.config_id));
    points
}

/// The rank-0 subset of [`pareto_points`].
pub fn pareto_front<'a>(
    evals: impl IntoIterator<Item = &'a EvalResult>,
    feature: usize,
    aggregate: Aggregate,
    sense: Sense,
) -> Vec<ParetoPoint> {
    pareto_points(evals, feature, aggregate, sense).into_iter().filter(|p| p.rank == 0).collect()
}

/// Spread (max − min) of the aggregate among points with accuracy at least
/// `min_accuracy`; `None` when no point qualifies.
pub fn aggregate_range(points: &[ParetoPoint], min_accuracy: f64) -> Option<f64> {
    let xs: Vec<f64> = points.iter().filter(|p| p.accuracy >= min_accuracy).map(|p| p.aggregate).collect();
    if xs.is_empty() {
        return None;
    }
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    Some(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_points() {
        let p = vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(non_dominated_sort(&p, &[true, true]), vec![0, 2, 1, 1]);
        assert_eq!(non_dominated_sort(&p, &[false, false]), vec![2, 0, 1, 1]);
    }

    #[test]
    fn identical_points_share_front_zero() {
        let p = vec![vec![0.5, 2.0]; 5];
        assert_eq!(non_dominated_sort(&p, &[true, false]), vec![0; 5]);
    }

    #[test]
    fn range_filter() {
        let pts = vec![
            ParetoPoint { config_id: 1, accuracy: 0.9, aggregate: 1.0, rank: 0 },
            ParetoPoint { config_id: 2, accuracy: 0.8, aggregate: -5.0, rank: 0 },
            ParetoPoint { config_id: 3, accuracy: 0.95, aggregate: -0.5, rank: 0 },
        ];
        assert_eq!(aggregate_range(&pts, 0.85), Some(1.5));
        assert_eq!(aggregate_range(&pts, 0.99), None);
    }
}
