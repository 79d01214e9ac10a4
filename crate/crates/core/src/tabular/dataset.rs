use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Result, TabularError};

/// How a schema feature maps onto encoded columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnGroup {
    Numeric { feature: String, column: usize },
    OneHot { feature: String, first_column: usize, levels: Vec<String> },
}

impl ColumnGroup {
    pub fn feature(&self) -> &str {
        match self {
            ColumnGroup::Numeric { feature, .. } | ColumnGroup::OneHot { feature, .. } => feature,
        }
    }

    pub fn columns(&self) -> std::ops::Range<usize> {
        match self {
            ColumnGroup::Numeric { column, .. } => *column..*column + 1,
            ColumnGroup::OneHot { first_column, levels, .. } => *first_column..*first_column + levels.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tag: String,
    /// Source rows removed because a cell was missing.
    pub dropped_rows: Vec<usize>,
    /// Source row index of every retained row, in matrix order.
    pub row_ids: Vec<usize>,
}

/// Encoded feature matrix with a binary target.
///
/// Immutable after construction; every constructor checks the shape and
/// one-hot invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    matrix: Array2<f64>,
    target: Vec<u8>,
    column_names: Vec<String>,
    layout: Vec<ColumnGroup>,
    source: Provenance,
}

impl Dataset {
    pub fn new(
        matrix: Array2<f64>,
        target: Vec<u8>,
        column_names: Vec<String>,
        layout: Vec<ColumnGroup>,
        source: Provenance,
    ) -> Result<Self> {
        let ds = Self { matrix, target, column_names, layout, source };
        ds.validate()?;
        Ok(ds)
    }

    /// All-numeric dataset with source rows numbered `0..n`.
    pub fn from_numeric(
        matrix: Array2<f64>,
        target: Vec<u8>,
        column_names: Vec<String>,
        tag: impl Into<String>,
    ) -> Result<Self> {
        let layout = column_names
            .iter()
            .enumerate()
            .map(|(column, name)| ColumnGroup::Numeric { feature: name.clone(), column })
            .collect();
        let n = matrix.nrows();
        Self::new(
            matrix,
            target,
            column_names,
            layout,
            Provenance { tag: tag.into(), dropped_rows: Vec::new(), row_ids: (0..n).collect() },
        )
    }

    fn validate(&self) -> Result<()> {
        let (rows, cols) = self.matrix.dim();
        let bad = |msg: String| Err(TabularError::InvalidDataset(msg));
        if rows != self.target.len() {
            return bad(format!("{rows} rows but {} targets", self.target.len()));
        }
        if cols != self.column_names.len() {
            return bad(format!("{cols} columns but {} names", self.column_names.len()));
        }
        if rows != self.source.row_ids.len() {
            return bad(format!("{rows} rows but {} row ids", self.source.row_ids.len()));
        }
        if let Some(t) = self.target.iter().find(|&&t| t > 1) {
            return bad(format!("target value {t} is not binary"));
        }
        if self.matrix.iter().any(|v| !v.is_finite()) {
            return bad("matrix contains non-finite values".into());
        }
        let mut covered = 0;
        for group in &self.layout {
            let range = group.columns();
            if range.start != covered || range.end > cols {
                return bad(format!("layout of `{}` does not tile the columns", group.feature()));
            }
            covered = range.end;
            if let ColumnGroup::OneHot { .. } = group {
                for (i, row) in self.matrix.rows().into_iter().enumerate() {
                    let block = row.slice(ndarray::s![range.clone()]);
                    let ones = block.iter().filter(|&&v| v == 1.0).count();
                    let zeros = block.iter().filter(|&&v| v == 0.0).count();
                    if ones != 1 || ones + zeros != block.len() {
                        return bad(format!("row {i}: one-hot group `{}` is not a unit vector", group.feature()));
                    }
                }
            }
        }
        if covered != cols {
            return bad("layout does not cover every column".into());
        }
        Ok(())
    }

    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.matrix.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.matrix.row(i)
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn layout(&self) -> &[ColumnGroup] {
        &self.layout
    }

    pub fn source(&self) -> &Provenance {
        &self.source
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.target.iter().filter(|&&t| t == 1).count();
        [self.target.len() - ones, ones]
    }

    /// Rows `rows` (positions in this dataset) as a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            matrix: self.matrix.select(Axis(0), rows),
            target: rows.iter().map(|&r| self.target[r]).collect(),
            column_names: self.column_names.clone(),
            layout: self.layout.clone(),
            source: Provenance {
                tag: self.source.tag.clone(),
                dropped_rows: self.source.dropped_rows.clone(),
                row_ids: rows.iter().map(|&r| self.source.row_ids[r]).collect(),
            },
        }
    }

    /// Same rows with one column replaced.
    pub fn with_column(&self, column: usize, values: &[f64]) -> Result<Dataset> {
        if values.len() != self.n_rows() || column >= self.n_columns() {
            return Err(TabularError::InvalidDataset("replacement column has the wrong shape".into()));
        }
        let mut matrix = self.matrix.clone();
        for (cell, &v) in matrix.column_mut(column).iter_mut().zip(values) {
            *cell = v;
        }
        Dataset::new(matrix, self.target.clone(), self.column_names.clone(), self.layout.clone(), self.source.clone())
    }

    /// Recovers the schema-level value of every feature in row `i`.
    pub fn decode_row(&self, i: usize) -> Vec<String> {
        let row = self.matrix.row(i);
        self.layout
            .iter()
            .map(|group| match group {
                ColumnGroup::Numeric { column, .. } => format!("{}", row[*column]),
                ColumnGroup::OneHot { first_column, levels, .. } => {
                    let hot = (0..levels.len()).find(|&k| row[first_column + k] == 1.0).unwrap_or(0);
                    levels[hot].clone()
                }
            })
            .collect()
    }

    /// SHA-256 over shape, matrix bits, and target.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_rows() as u64).to_le_bytes());
        h.update((self.n_columns() as u64).to_le_bytes());
        for v in self.matrix.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update(&self.target);
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn shape_checks() {
        let err = Dataset::from_numeric(array![[1.0], [2.0]], vec![0], names(&["a"]), "t");
        assert!(err.is_err());
        let err = Dataset::from_numeric(array![[1.0], [2.0]], vec![0, 2], names(&["a"]), "t");
        assert!(err.is_err());
        let err = Dataset::from_numeric(array![[f64::NAN], [2.0]], vec![0, 1], names(&["a"]), "t");
        assert!(err.is_err());
    }

    #[test]
    fn one_hot_groups_must_be_unit_vectors() {
        let layout = vec![ColumnGroup::OneHot { feature: "c".into(), first_column: 0, levels: names(&["x", "y"]) }];
        let prov = Provenance { tag: "t".into(), dropped_rows: vec![], row_ids: vec![0, 1] };
        let ok = Dataset::new(array![[1.0, 0.0], [0.0, 1.0]], vec![0, 1], names(&["c=x", "c=y"]), layout.clone(), prov.clone());
        assert!(ok.is_ok());
        let bad = Dataset::new(array![[1.0, 1.0], [0.0, 1.0]], vec![0, 1], names(&["c=x", "c=y"]), layout, prov);
        assert!(bad.is_err());
    }

    #[test]
    fn subset_keeps_source_ids() {
        let ds = Dataset::from_numeric(array![[1.0], [2.0], [3.0]], vec![0, 1, 0], names(&["a"]), "t").unwrap();
        let sub = ds.subset(&[2, 0]);
        assert_eq!(sub.source().row_ids, vec![2, 0]);
        assert_eq!(sub.target(), &[0, 0]);
        assert_eq!(sub.row(0)[0], 3.0);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = Dataset::from_numeric(array![[1.0], [2.0]], vec![0, 1], names(&["a"]), "t").unwrap();
        let b = Dataset::from_numeric(array![[1.0], [2.5]], vec![0, 1], names(&["a"]), "t").unwrap();
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
