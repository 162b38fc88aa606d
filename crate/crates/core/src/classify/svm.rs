//! Linear SVM trained with seeded stochastic subgradient steps on the
//! L2-regularized hinge objective (Pegasos step sizes).

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, Standardization};
use crate::stats::column_mean_sd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-3,
            epochs: 200,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// Training-set centring and scaling applied before scoring.
    pub standardization: Standardization,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub params: SvmParams,
    /// Objective of the returned iterate had training stopped after each epoch.
    pub objective_trace: Vec<f64>,
    /// Objective of each epoch's averaged iterate.
    pub epoch_objective: Vec<f64>,
}

fn sign(label: Label) -> f64 {
    match label {
        Label::Satire => 1.0,
        Label::Fake => -1.0,
    }
}

fn objective(x: &[DVector<f64>], y: &[f64], w: &DVector<f64>, lambda: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * w.dot(xi)).max(0.0))
        .sum();
    0.5 * lambda * w.norm_squared() + hinge / x.len() as f64
}

/// Fits on the rows of `x`, standardizing with their own means and sds.
/// The bias is learned as the weight of a constant feature.
pub fn train_svm(x: &FeatureMatrix, labels: &[Label], params: &SvmParams) -> Result<SvmModel> {
    let n = x.nrows();
    let p = x.ncols();
    if labels.len() != n {
        return Err(Error::Validation(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    if !(Label::ALL.iter().all(|l| labels.contains(l))) {
        return Err(Error::Validation("SVM training needs both classes".into()));
    }
    if !(params.lambda > 0.0) || params.epochs == 0 {
        return Err(Error::Config(
            "SVM needs lambda > 0 and at least one epoch".into(),
        ));
    }
    let mut means = Vec::with_capacity(p);
    let mut sds = Vec::with_capacity(p);
    for (j, name) in x.column_names.iter().enumerate() {
        let col: Vec<f64> = x.values.column(j).iter().copied().collect();
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i,
                column: name.clone(),
            });
        }
        let (m, sd) = column_mean_sd(&col);
        means.push(m);
        sds.push(if sd > 0.0 && sd.is_finite() { sd } else { 1.0 });
    }
    let standardization = Standardization {
        columns: x.column_names.clone(),
        means,
        sds,
    };
    let rows: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            DVector::from_fn(p + 1, |j, _| {
                if j == p {
                    1.0
                } else {
                    (x.values[(i, j)] - standardization.means[j]) / standardization.sds[j]
                }
            })
        })
        .collect();
    let y: Vec<f64> = labels.iter().map(|&l| sign(l)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = DVector::zeros(p + 1);
    let mut t = 0usize;
    let mut best = (f64::INFINITY, DVector::zeros(p + 1));
    let mut objective_trace = Vec::with_capacity(params.epochs);
    let mut epoch_objective = Vec::with_capacity(params.epochs);
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut avg = DVector::zeros(p + 1);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (params.lambda * t as f64);
            let margin = y[i] * w.dot(&rows[i]);
            w *= 1.0 - eta * params.lambda;
            if margin < 1.0 {
                w.axpy(eta * y[i], &rows[i], 1.0);
            }
            avg += &w;
        }
        avg /= n as f64;
        let obj = objective(&rows, &y, &avg, params.lambda);
        epoch_objective.push(obj);
        if obj < best.0 {
            best = (obj, avg);
        }
        objective_trace.push(best.0);
    }
    let w = best.1;
    Ok(SvmModel {
        standardization,
        weights: w.iter().take(p).copied().collect(),
        bias: w[p],
        params: *params,
        objective_trace,
        epoch_objective,
    })
}

impl SvmModel {
    /// Signed margin of a raw (unstandardized) feature row.
    pub fn margin(&self, row: &[f64]) -> f64 {
        let s = &self.standardization;
        row.iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(j, (x, w))| w * (x - s.means[j]) / s.sds[j])
            .sum::<f64>()
            + self.bias
    }

    /// Label by the sign of the margin (Satire when positive).
    pub fn predict(&self, row: &[f64]) -> (Label, f64) {
        let m = self.margin(row);
        (if m > 0.0 { Label::Satire } else { Label::Fake }, m)
    }

    pub fn predict_matrix(&self, x: &FeatureMatrix) -> Result<Vec<(Label, f64)>> {
        let sub = x.select_columns(&self.standardization.columns)?;
        Ok((0..sub.nrows())
            .map(|i| self.predict(&sub.row(i)))
            .collect())
    }
}
