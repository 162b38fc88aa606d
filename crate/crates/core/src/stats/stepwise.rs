use super::logistic::{fit_logistic, RegressionFit};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub name: String,
    pub p_value: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseResult {
    pub alpha: f64,
    pub removals: Vec<Removal>,
    pub fit: RegressionFit,
    pub survivors: Vec<String>,
}

fn require_converged(fit: &RegressionFit, columns: &[String]) -> Result<()> {
    if fit.converged {
        return Ok(());
    }
    Err(Error::NonConvergence {
        what: format!("logistic regression on [{}]", columns.join(", ")),
        iterations: fit.iterations,
        residual: fit.gradient_norm,
    })
}

/// Backward elimination: refit and drop the predictor with the largest
/// p-value while it exceeds `alpha` and more than one predictor remains.
/// Ties go to the smaller |z|, then to the earlier column.
pub fn stepwise_backward(x: &FeatureMatrix, y: &[u8], alpha: f64) -> Result<StepwiseResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Validation(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let mut columns = x.column_names.clone();
    let mut removals = Vec::new();
    loop {
        let sub = x.select_columns(&columns)?;
        let fit = fit_logistic(&sub, y)?;
        require_converged(&fit, &columns)?;
        if columns.len() <= 1 {
            return Ok(StepwiseResult {
                alpha,
                removals,
                survivors: columns,
                fit,
            });
        }
        let worst = fit
            .coefficients
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| {
                a.p_value
                    .total_cmp(&b.p_value)
                    .then(b.z.abs().total_cmp(&a.z.abs()))
                    .then(j.cmp(i))
            })
            .map(|(i, _)| i)
            .expect("at least one predictor");
        let c = &fit.coefficients[worst];
        if c.p_value <= alpha {
            return Ok(StepwiseResult {
                alpha,
                removals,
                survivors: columns,
                fit,
            });
        }
        log::debug!("stepwise: removing {} (p = {:.4})", c.name, c.p_value);
        removals.push(Removal {
            name: c.name.clone(),
            p_value: c.p_value,
            z: c.z,
        });
        columns.remove(worst);
    }
}
