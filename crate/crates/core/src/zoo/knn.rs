use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeights {
    Uniform,
    /// Inverse distance; exact matches, when present, take all the weight.
    Distance,
}

/// k-nearest-neighbour vote under Euclidean distance. Equal distances are
/// resolved in favour of the lower training row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestNeighbours {
    pub k: usize,
    pub weights: KnnWeights,
    pub points: Array2<f64>,
    pub labels: Vec<u8>,
}

impl NearestNeighbours {
    pub(crate) fn fit(x: ArrayView2<'_, f64>, y: &[u8], k: usize, weights: KnnWeights) -> Self {
        Self { k, weights, points: x.to_owned(), labels: y.to_vec() }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut dist: Vec<(f64, usize)> = self
            .points
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        let k = self.k.min(dist.len());
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, by_key);
            dist.truncate(k);
        }
        let exact: Vec<usize> = dist.iter().filter(|d| d.0 == 0.0).map(|d| d.1).collect();
        let (mut num, mut den) = (0.0, 0.0);
        match self.weights {
            KnnWeights::Distance if !exact.is_empty() => {
                for i in exact {
                    num += self.labels[i] as f64;
                    den += 1.0;
                }
            }
            KnnWeights::Distance => {
                for &(d2, i) in &dist {
                    let w = 1.0 / d2.sqrt();
                    num += w * self.labels[i] as f64;
                    den += w;
                }
            }
            KnnWeights::Uniform => {
                for &(_, i) in &dist {
                    num += self.labels[i] as f64;
                    den += 1.0;
                }
            }
        }
        num / den
    }
}
