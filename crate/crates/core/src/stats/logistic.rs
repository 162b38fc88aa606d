//! Binary logistic regression by iteratively reweighted least squares, with
//! Wald standard errors and two-sided normal p-values.

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, Copy)]
pub struct LogisticOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub loglik_tolerance: f64,
    /// Any |β| above this is taken as a sign of separation.
    pub coefficient_cap: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            max_iterations: 100,
            gradient_tolerance: 1e-8,
            loglik_tolerance: 1e-10,
            coefficient_cap: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub log_likelihood: f64,
    pub converged: bool,
    /// False when separation was detected; the Wald columns are then meaningless.
    pub wald_reliable: bool,
    pub iterations: usize,
    /// Max-norm of the score vector at the reported estimate.
    pub gradient_norm: f64,
    pub n: usize,
}

impl RegressionFit {
    pub fn get(&self, name: &str) -> Option<&Coefficient> {
        if name == INTERCEPT {
            return Some(&self.intercept);
        }
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Two-sided normal p-value of a Wald statistic.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return 1.0;
    }
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter()
        .zip(y.iter())
        .map(|(e, yi)| yi * e - softplus(*e))
        .sum()
}

fn gradient_and_information(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    beta: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let eta = x * beta;
    let p: DVector<f64> = eta.map(sigmoid);
    let grad = x.transpose() * (y - &p);
    let w = p.map(|pi| pi * (1.0 - pi));
    let mut xw = x.clone();
    for (i, wi) in w.iter().enumerate() {
        xw.row_mut(i).scale_mut(*wi);
    }
    let info = x.transpose() * xw;
    (grad, info)
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn invert(info: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    if let Some(ch) = info.clone().cholesky() {
        return (ch.inverse(), false);
    }
    log::warn!("information matrix is singular; adding a ridge of 1e-8");
    let ridged = info + DMatrix::identity(info.nrows(), info.ncols()) * 1e-8;
    match ridged.clone().cholesky() {
        Some(ch) => (ch.inverse(), true),
        None => (
            ridged
                .try_inverse()
                .unwrap_or_else(|| DMatrix::from_element(info.nrows(), info.ncols(), f64::NAN)),
            true,
        ),
    }
}

/// Fits `P(y = 1) = σ(β0 + Xβ)` with the columns of `x` as predictors.
/// `y` holds 0/1 labels (Satire = 1 by convention).
pub fn fit_logistic(x: &FeatureMatrix, y: &[u8]) -> Result<RegressionFit> {
    fit_logistic_with(x, y, &LogisticOptions::default())
}

pub fn fit_logistic_with(
    x: &FeatureMatrix,
    y: &[u8],
    opts: &LogisticOptions,
) -> Result<RegressionFit> {
    let n = x.nrows();
    let k = x.ncols();
    if y.len() != n {
        return Err(Error::Validation(format!(
            "{} labels for {n} rows",
            y.len()
        )));
    }
    if let Some(bad) = y.iter().find(|v| **v > 1) {
        return Err(Error::Validation(format!("label {bad} is not 0 or 1")));
    }
    let ones = y.iter().filter(|v| **v == 1).count();
    if ones == 0 || ones == n {
        return Err(Error::Validation(
            "logistic regression needs both classes".into(),
        ));
    }
    if n <= k + 1 {
        return Err(Error::Validation(format!(
            "logistic regression needs more rows than parameters ({n} ≤ {})",
            k + 1
        )));
    }
    for (j, name) in x.column_names.iter().enumerate() {
        if let Some(i) = x.values.column(j).iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i,
                column: name.clone(),
            });
        }
    }

    let design = DMatrix::from_fn(
        n,
        k + 1,
        |i, j| if j == 0 { 1.0 } else { x.values[(i, j - 1)] },
    );
    let yv = DVector::from_iterator(n, y.iter().map(|&v| v as f64));
    let mut beta = DVector::zeros(k + 1);
    let mut ll = log_likelihood(&design, &yv, &beta);
    let mut converged = false;
    let mut separated = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let (grad, info) = gradient_and_information(&design, &yv, &beta);
        if max_abs(&grad) < opts.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let (inv, _) = invert(&info);
        let step = &inv * &grad;
        if step.iter().any(|s| !s.is_finite()) {
            break;
        }
        let mut t = 1.0;
        let mut candidate = &beta + &step;
        let mut cand_ll = log_likelihood(&design, &yv, &candidate);
        let mut halvings = 0;
        while !(cand_ll >= ll - 1e-12 * ll.abs().max(1.0)) && halvings < 40 {
            t *= 0.5;
            halvings += 1;
            candidate = &beta + &step * t;
            cand_ll = log_likelihood(&design, &yv, &candidate);
        }
        let change = cand_ll - ll;
        beta = candidate;
        ll = cand_ll;
        if max_abs(&beta) > opts.coefficient_cap {
            separated = true;
            log::warn!(
                "logistic coefficients exceed {} (separation); Wald values are unreliable",
                opts.coefficient_cap
            );
            break;
        }
        if change.abs() < opts.loglik_tolerance {
            let (g, _) = gradient_and_information(&design, &yv, &beta);
            if max_abs(&g) < opts.gradient_tolerance {
                converged = true;
                break;
            }
        }
    }

    // complete separation: every case fitted to within 1e-6 of its label
    let fitted = (&design * &beta).map(sigmoid);
    if !separated
        && fitted
            .iter()
            .zip(yv.iter())
            .all(|(p, y)| (p - y).abs() < 1e-6)
    {
        separated = true;
        log::warn!("classes are completely separated; Wald values are unreliable");
    }
    let (grad, info) = gradient_and_information(&design, &yv, &beta);
    let (cov, _) = invert(&info);
    let names: Vec<&str> = std::iter::once(INTERCEPT)
        .chain(x.column_names.iter().map(String::as_str))
        .collect();
    let mut coefs: Vec<Coefficient> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = cov[(j, j)].max(0.0).sqrt();
            let z = beta[j] / se;
            Coefficient {
                name: name.to_string(),
                estimate: beta[j],
                std_error: se,
                z,
                p_value: normal_two_sided_p(z),
            }
        })
        .collect();
    let intercept = coefs.remove(0);
    Ok(RegressionFit {
        intercept,
        coefficients: coefs,
        log_likelihood: ll,
        converged: converged && !separated,
        wald_reliable: !separated,
        iterations,
        gradient_norm: max_abs(&grad),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_symmetry_and_limits() {
        assert!((normal_two_sided_p(0.0) - 1.0).abs() < 1e-15);
        assert!((normal_two_sided_p(1.959963984540054) - 0.05).abs() < 1e-10);
        assert_eq!(normal_two_sided_p(2.5), normal_two_sided_p(-2.5));
    }

    #[test]
    fn separated_data_is_flagged() {
        let x = FeatureMatrix::from_rows(
            (0..6).map(|i| i.to_string()).collect(),
            vec!["x".into()],
            &[
                vec![-3.0],
                vec![-2.0],
                vec![-1.0],
                vec![1.0],
                vec![2.0],
                vec![3.0],
            ],
        )
        .unwrap();
        let fit = fit_logistic(&x, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!(!fit.converged);
        assert!(!fit.wald_reliable);
    }

    #[test]
    fn rejects_single_class_and_bad_labels() {
        let x = FeatureMatrix::from_rows(
            (0..4).map(|i| i.to_string()).collect(),
            vec!["x".into()],
            &[vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
        )
        .unwrap();
        assert!(fit_logistic(&x, &[1, 1, 1, 1]).is_err());
        assert!(fit_logistic(&x, &[0, 2, 1, 0]).is_err());
        assert!(fit_logistic(&x, &[0, 1]).is_err());
    }
}
