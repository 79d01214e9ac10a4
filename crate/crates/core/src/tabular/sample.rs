use serde::{Deserialize, Serialize};

use super::{Result, SplitDataset, TabularError};
use crate::rng;

/// Rows every candidate pipeline is explained on: background rows from the
/// training side, evaluation rows from the test side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplainSample {
    pub background_rows: Vec<usize>,
    pub eval_rows: Vec<usize>,
    pub background_size: usize,
    pub eval_size: usize,
    pub seed: u64,
}

impl ExplainSample {
    pub fn validate(&self, split: &SplitDataset) -> Result<()> {
        check_list(&self.background_rows, self.background_size, split.train.n_rows(), "background")?;
        check_list(&self.eval_rows, self.eval_size, split.test.n_rows(), "eval")
    }
}

fn check_list(rows: &[usize], size: usize, available: usize, which: &str) -> Result<()> {
    if rows.len() != size {
        return Err(TabularError::InvalidDataset(format!("{which} list has {} rows, size says {size}", rows.len())));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != rows.len() {
        return Err(TabularError::InvalidDataset(format!("{which} rows contain duplicates")));
    }
    if sorted.last().is_some_and(|&r| r >= available) {
        return Err(TabularError::InvalidDataset(format!("{which} row index out of range")));
    }
    Ok(())
}

/// Draws both lists without replacement; lists are returned sorted.
pub fn draw_explain_sample(
    split: &SplitDataset,
    background_size: usize,
    eval_size: usize,
    seed: u64,
) -> Result<ExplainSample> {
    let n_train = split.train.n_rows();
    let n_test = split.test.n_rows();
    if background_size > n_train {
        return Err(TabularError::SampleTooLarge { which: "background", requested: background_size, available: n_train });
    }
    if eval_size > n_test {
        return Err(TabularError::SampleTooLarge { which: "eval", requested: eval_size, available: n_test });
    }
    let draw = |stream: u64, n: usize, k: usize| {
        let mut r = rng::seeded(rng::derive_seed(seed, stream));
        let mut rows = rand::seq::index::sample(&mut r, n, k).into_vec();
        rows.sort_unstable();
        rows
    };
    Ok(ExplainSample {
        background_rows: draw(0, n_train, background_size),
        eval_rows: draw(1, n_test, eval_size),
        background_size,
        eval_size,
        seed,
    })
}
