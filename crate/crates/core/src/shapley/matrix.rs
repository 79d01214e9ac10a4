use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kernel_shap, ExplainerConfig, Predict, Result, ShapError, ShapVector};
use crate::rng;
use crate::tabular::{ExplainSample, SplitDataset};
use crate::zoo::TrainedPipeline;

/// One attribution vector per evaluation row, all against one background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapMatrix {
    pub rows: Vec<ShapVector>,
    pub feature_names: Vec<String>,
    pub sample: ExplainSample,
}

impl ShapMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Attributions as an `n_rows × n_features` array.
    pub fn values(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n_rows(), self.n_features()), |(i, j)| self.rows[i].values[j])
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[j]).collect()
    }

    /// Header `eval_row, <features…>, base_value, instance_output`; one line
    /// per explained row.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["eval_row".to_string()];
        header.extend(self.feature_names.iter().cloned());
        header.push("base_value".into());
        header.push("instance_output".into());
        w.write_record(&header)?;
        for (row, v) in self.sample.eval_rows.iter().zip(&self.rows) {
            let mut rec = vec![row.to_string()];
            rec.extend(v.values.iter().map(|x| x.to_string()));
            rec.push(v.base_value.to_string());
            rec.push(v.instance_output.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads what [`write_csv`](Self::write_csv) wrote. The background part of
    /// `sample` is not stored in the CSV and must be supplied.
    pub fn read_csv<R: Read>(input: R, mut sample: ExplainSample) -> std::result::Result<Self, String> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| e.to_string())?.clone();
        let n = header.len();
        if n < 4 || &header[0] != "eval_row" || &header[n - 2] != "base_value" || &header[n - 1] != "instance_output" {
            return Err("unexpected SHAP CSV header".into());
        }
        let feature_names: Vec<String> = header.iter().skip(1).take(n - 3).map(str::to_string).collect();
        let mut rows = Vec::new();
        let mut eval_rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let num = |i: usize| rec[i].parse::<f64>().map_err(|e| format!("{}: {e}", &rec[i]));
            eval_rows.push(rec[0].parse::<usize>().map_err(|e| e.to_string())?);
            let values = (1..n - 2).map(num).collect::<std::result::Result<Vec<_>, _>>()?;
            rows.push(ShapVector { values, base_value: num(n - 2)?, instance_output: num(n - 1)? });
        }
        sample.eval_size = eval_rows.len();
        sample.eval_rows = eval_rows;
        Ok(Self { rows, feature_names, sample })
    }
}

/// Explains every evaluation row of `sample` against its background rows.
///
/// Rows run in parallel; each uses a seed derived from its position, so the
/// matrix does not depend on the thread count.
pub fn explain_set(
    model: &TrainedPipeline,
    split: &SplitDataset,
    sample: &ExplainSample,
    cfg: &ExplainerConfig,
) -> Result<ShapMatrix> {
    sample.validate(split).map_err(|e| ShapError::InvalidConfig(e.to_string()))?;
    let m = split.train.n_columns();
    if model.n_features() != m {
        return Err(ShapError::DimensionMismatch { expected: model.n_features(), got: m });
    }
    let background = split.train.subset(&sample.background_rows);
    let rows = explain_rows(model, background.matrix(), split.test.matrix(), &sample.eval_rows, cfg)?;
    Ok(ShapMatrix { rows, feature_names: split.train.column_names().to_vec(), sample: sample.clone() })
}

fn explain_rows<P: Predict + ?Sized>(
    model: &P,
    background: ArrayView2<'_, f64>,
    pool: ArrayView2<'_, f64>,
    rows: &[usize],
    cfg: &ExplainerConfig,
) -> Result<Vec<ShapVector>> {
    rows.par_iter()
        .enumerate()
        .map(|(k, &r)| {
            let cfg = ExplainerConfig { seed: rng::derive_seed(cfg.seed, k as u64), ..cfg.clone() };
            let instance = pool.row(r).to_vec();
            kernel_shap(model, &instance, background, &cfg)
        })
        .collect()
}
