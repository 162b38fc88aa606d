use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, Standardization};

/// Relative standard deviation below which a column counts as constant.
const CONSTANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Standardized {
    /// z-scored matrix with `standardization` set.
    pub matrix: FeatureMatrix,
    /// Constant columns removed before scoring.
    pub dropped: Vec<String>,
}

pub fn column_mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Column-wise z-scores with the n−1 standard deviation. Constant columns
/// are dropped with a warning.
pub fn standardize(matrix: &FeatureMatrix) -> Result<Standardized> {
    let n = matrix.nrows();
    if n < 2 {
        return Err(Error::Validation(format!(
            "standardize needs at least 2 rows, got {n}"
        )));
    }
    let mut kept = Vec::new();
    let mut means = Vec::new();
    let mut sds = Vec::new();
    let mut dropped = Vec::new();
    for (j, name) in matrix.column_names.iter().enumerate() {
        let col: Vec<f64> = matrix.values.column(j).iter().copied().collect();
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i,
                column: name.clone(),
            });
        }
        let (mean, sd) = column_mean_sd(&col);
        if sd <= CONSTANT_TOLERANCE * mean.abs().max(1.0) {
            log::warn!("dropping constant column `{name}`");
            dropped.push(name.clone());
            continue;
        }
        kept.push(name.clone());
        means.push(mean);
        sds.push(sd);
    }
    let params = Standardization {
        columns: kept,
        means,
        sds,
    };
    let matrix = apply_standardization(matrix, &params)?;
    Ok(Standardized { matrix, dropped })
}

/// Selects `params.columns` from `matrix` and z-scores them with the given
/// means and standard deviations.
pub fn apply_standardization(
    matrix: &FeatureMatrix,
    params: &Standardization,
) -> Result<FeatureMatrix> {
    let sub = matrix.select_columns(&params.columns)?;
    let n = sub.nrows();
    let p = params.columns.len();
    let values = DMatrix::from_fn(n, p, |i, j| {
        (sub.values[(i, j)] - params.means[j]) / params.sds[j]
    });
    let mut out = FeatureMatrix::new(sub.row_ids.clone(), params.columns.clone(), values)?;
    out.standardization = Some(params.clone());
    Ok(out)
}
