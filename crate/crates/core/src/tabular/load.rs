use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use ndarray::Array2;

use super::{ColumnGroup, Dataset, FeatureKind, FeatureSchema, Provenance, Result, TabularError};

/// Reads a comma-separated file with a header row.
///
/// Rows with any empty cell are dropped and their indices (0-based, header
/// excluded) recorded in the provenance. Categorical features are one-hot
/// encoded in schema level order.
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(file, schema, &format!("csv:{}", path.display()))
}

pub fn load_csv_reader<R: Read>(reader: R, schema: &FeatureSchema, tag: &str) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    let expected: BTreeSet<&str> =
        schema.features.iter().map(|f| f.name.as_str()).chain([schema.target_name.as_str()]).collect();
    let found: BTreeSet<&str> = header.iter().map(String::as_str).collect();
    if found.len() != header.len() {
        return Err(TabularError::HeaderMismatch("duplicate column names".into()));
    }
    if expected != found {
        let missing: Vec<_> = expected.difference(&found).collect();
        let extra: Vec<_> = found.difference(&expected).collect();
        return Err(TabularError::HeaderMismatch(format!("missing {missing:?}, unexpected {extra:?}")));
    }
    let position = |name: &str| header.iter().position(|h| h == name).expect("checked above");
    let feature_pos: Vec<usize> = schema.features.iter().map(|f| position(&f.name)).collect();
    let target_pos = position(&schema.target_name);

    let mut layout = Vec::new();
    let mut column_names = Vec::new();
    for f in &schema.features {
        match &f.kind {
            FeatureKind::Numeric => {
                layout.push(ColumnGroup::Numeric { feature: f.name.clone(), column: column_names.len() });
                column_names.push(f.name.clone());
            }
            FeatureKind::Categorical { levels } => {
                layout.push(ColumnGroup::OneHot {
                    feature: f.name.clone(),
                    first_column: column_names.len(),
                    levels: levels.clone(),
                });
                column_names.extend(levels.iter().map(|l| format!("{}={}", f.name, l)));
            }
        }
    }
    let width = column_names.len();

    let mut values = Vec::new();
    let mut target = Vec::new();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().any(str::is_empty) {
            dropped.push(row);
            continue;
        }
        for (f, &pos) in schema.features.iter().zip(&feature_pos) {
            let cell = &record[pos];
            match &f.kind {
                FeatureKind::Numeric => {
                    let v: f64 = cell.parse().map_err(|_| TabularError::BadNumber {
                        row,
                        column: f.name.clone(),
                        value: cell.to_string(),
                    })?;
                    if !v.is_finite() {
                        return Err(TabularError::BadNumber { row, column: f.name.clone(), value: cell.to_string() });
                    }
                    values.push(v);
                }
                FeatureKind::Categorical { levels } => {
                    let hot = levels.iter().position(|l| l == cell).ok_or_else(|| TabularError::UnknownLevel {
                        row,
                        column: f.name.clone(),
                        value: cell.to_string(),
                    })?;
                    values.extend((0..levels.len()).map(|k| if k == hot { 1.0 } else { 0.0 }));
                }
            }
        }
        let raw = &record[target_pos];
        let t = schema
            .parse_target(raw)
            .ok_or_else(|| TabularError::NonBinaryTarget { row, value: raw.to_string() })?;
        target.push(t);
        kept.push(row);
    }
    if kept.is_empty() {
        return Err(TabularError::EmptyAfterRemoval);
    }
    let matrix = Array2::from_shape_vec((kept.len(), width), values)
        .map_err(|e| TabularError::InvalidDataset(e.to_string()))?;
    Dataset::new(
        matrix,
        target,
        column_names,
        layout,
        Provenance { tag: tag.to_string(), dropped_rows: dropped, row_ids: kept },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::FeatureSpec;

    fn schema() -> FeatureSchema {
        FeatureSchema::new(vec![FeatureSpec::numeric("x"), FeatureSpec::categorical("c", &["a", "b", "c"])], "y")
            .unwrap()
    }

    fn load(text: &str) -> Result<Dataset> {
        load_csv_reader(text.as_bytes(), &schema(), "test")
    }

    #[test]
    fn three_rows_no_missing() {
        let ds = load("x,c,y\n1.5,a,0\n2,b,1\n3,c,1\n").unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert!(ds.source().dropped_rows.is_empty());
    }

    #[test]
    fn missing_cell_drops_row() {
        let ds = load("x,c,y\n1.5,a,0\n,b,1\n3,c,1\n").unwrap();
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.source().dropped_rows, vec![1]);
        assert_eq!(ds.source().row_ids, vec![0, 2]);
    }

    #[test]
    fn one_hot_encoding() {
        let ds = load("x,c,y\n1.5,a,0\n2,b,1\n3,c,1\n").unwrap();
        assert_eq!(ds.column_names(), &["x", "c=a", "c=b", "c=c"]);
        for i in 0..3 {
            let row = ds.row(i);
            assert_eq!(row[1] + row[2] + row[3], 1.0);
        }
        assert_eq!(ds.decode_row(1), vec!["2", "b"]);
    }

    #[test]
    fn header_order_is_free() {
        let ds = load("y,c,x\n0,a,1.5\n1,b,2\n").unwrap();
        assert_eq!(ds.row(1)[0], 2.0);
        assert_eq!(ds.target(), &[0, 1]);
    }

    #[test]
    fn errors() {
        assert!(matches!(load("x,c,y\n1,d,0\n"), Err(TabularError::UnknownLevel { .. })));
        assert!(matches!(load("x,c,y\n1,a,2\n"), Err(TabularError::NonBinaryTarget { .. })));
        assert!(matches!(load("x,c,y\nfoo,a,1\n"), Err(TabularError::BadNumber { .. })));
        assert!(matches!(load("x,c,y\n,a,1\n"), Err(TabularError::EmptyAfterRemoval)));
        assert!(matches!(load("x,c\n1,a\n"), Err(TabularError::HeaderMismatch(_))));
        assert!(matches!(load("x,c,y,z\n1,a,1,2\n"), Err(TabularError::HeaderMismatch(_))));
        assert!(matches!(load("x,c,y\n1,a\n"), Err(TabularError::Csv(_))));
    }
}
