//! The article × index table shared by feature extraction, statistics and
//! classification.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-column centring and scaling recorded by [`crate::stats::standardize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

/// Rectangular table of reals: one row per article, one column per index.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub row_ids: Vec<String>,
    pub column_names: Vec<String>,
    pub values: DMatrix<f64>,
    pub standardization: Option<Standardization>,
}

impl FeatureMatrix {
    pub fn new(
        row_ids: Vec<String>,
        column_names: Vec<String>,
        values: DMatrix<f64>,
    ) -> Result<Self> {
        if values.nrows() != row_ids.len() || values.ncols() != column_names.len() {
            return Err(Error::Validation(format!(
                "matrix is {}x{} but has {} row ids and {} column names",
                values.nrows(),
                values.ncols(),
                row_ids.len(),
                column_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Validation(format!("duplicate column name `{name}`")));
            }
        }
        Ok(FeatureMatrix {
            row_ids,
            column_names,
            values,
            standardization: None,
        })
    }

    /// Build from row vectors; every row must have `column_names.len()` entries.
    pub fn from_rows(
        row_ids: Vec<String>,
        column_names: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let p = column_names.len();
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != p) {
            return Err(Error::Validation(format!("row {i} has wrong arity")));
        }
        let values = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        FeatureMatrix::new(row_ids, column_names, values)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.column_index(name)
            .map(|j| self.values.column(j).iter().copied().collect())
    }

    /// Columns `names` in the given order; errors with every missing name.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix> {
        let mut idx = Vec::with_capacity(names.len());
        let mut missing = Vec::new();
        for n in names {
            match self.column_index(n) {
                Some(j) => idx.push(j),
                None => missing.push(n.clone()),
            }
        }
        if !missing.is_empty() {
            return Err(Error::ColumnMismatch { missing });
        }
        let values = DMatrix::from_fn(self.nrows(), idx.len(), |i, k| self.values[(i, idx[k])]);
        FeatureMatrix::new(self.row_ids.clone(), names.to_vec(), values)
    }

    /// Rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let values = DMatrix::from_fn(indices.len(), self.ncols(), |i, j| {
            self.values[(indices[i], j)]
        });
        FeatureMatrix {
            row_ids: indices.iter().map(|&i| self.row_ids[i].clone()).collect(),
            column_names: self.column_names.clone(),
            values,
            standardization: self.standardization.clone(),
        }
    }

    /// Append a column at position `at`.
    pub fn insert_column(&mut self, at: usize, name: &str, column: &[f64]) -> Result<()> {
        if self.column_index(name).is_some() {
            return Err(Error::Validation(format!("duplicate column name `{name}`")));
        }
        if column.len() != self.nrows() {
            return Err(Error::Validation(format!(
                "column `{name}` has wrong length"
            )));
        }
        let mut values = self.values.clone().insert_column(at, 0.0);
        for (i, v) in column.iter().enumerate() {
            values[(i, at)] = *v;
        }
        self.values = values;
        self.column_names.insert(at, name.to_string());
        Ok(())
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_columns() {
        let err = FeatureMatrix::from_rows(
            vec!["a".into()],
            vec!["x".into(), "x".into()],
            &[vec![1.0, 2.0]],
        );
        assert!(err.is_err());
    }

    #[test]
    fn select_reports_all_missing() {
        let m = FeatureMatrix::from_rows(vec!["a".into()], vec!["x".into()], &[vec![1.0]]).unwrap();
        match m.select_columns(&["y".into(), "x".into(), "z".into()]) {
            Err(Error::ColumnMismatch { missing }) => assert_eq!(missing, vec!["y", "z"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn insert_column_keeps_order() {
        let mut m = FeatureMatrix::from_rows(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "z".into()],
            &[vec![1.0, 3.0], vec![4.0, 6.0]],
        )
        .unwrap();
        m.insert_column(1, "y", &[2.0, 5.0]).unwrap();
        assert_eq!(m.column_names, vec!["x", "y", "z"]);
        assert_eq!(m.row(1), vec![4.0, 5.0, 6.0]);
    }
}
