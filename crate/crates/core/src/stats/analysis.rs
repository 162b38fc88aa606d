use serde::{Deserialize, Serialize};

use super::logistic::{fit_logistic, RegressionFit};
use super::pca::{fit_pca, project_scores, varimax_rotate, PcaModel};
use super::report::{component_labels, significance_table, SignificanceTable};
use super::standardize::standardize;
use super::stepwise::{stepwise_backward, StepwiseResult};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub rotate: bool,
    pub kaiser_normalize: bool,
    pub alpha: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            rotate: true,
            kaiser_normalize: true,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub dropped_columns: Vec<String>,
    pub pca: PcaModel,
    pub scores: FeatureMatrix,
    pub full_fit: RegressionFit,
    pub stepwise: StepwiseResult,
    pub table: SignificanceTable,
}

impl Analysis {
    /// Distinct indices dominating the surviving components, in component order.
    pub fn survivor_indices(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for name in &self.stepwise.survivors {
            if let Some(j) = self.pca.component_names.iter().position(|c| c == name) {
                let label = &self.pca.component_labels[j];
                if !out.contains(label) {
                    out.push(label.clone());
                }
            }
        }
        out
    }
}

/// Standardize, PCA (optionally varimax-rotated), component scores, full
/// logistic fit and backward elimination. `y` uses Satire = 1.
pub fn analyze_matrix(
    matrix: &FeatureMatrix,
    y: &[u8],
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    let standardized = standardize(matrix)?;
    let mut pca = fit_pca(&standardized.matrix)?;
    if opts.rotate {
        pca = varimax_rotate(&pca, opts.kaiser_normalize)?;
    }
    let scores = project_scores(&standardized.matrix, &pca)?;
    let full_fit = fit_logistic(&scores, y)?;
    if !full_fit.converged {
        return Err(Error::NonConvergence {
            what: "logistic regression on all components".into(),
            iterations: full_fit.iterations,
            residual: full_fit.gradient_norm,
        });
    }
    let stepwise = stepwise_backward(&scores, y, opts.alpha)?;
    let table = significance_table(&full_fit, &stepwise, &component_labels(&pca));
    Ok(Analysis {
        dropped_columns: standardized.dropped,
        pca,
        scores,
        full_fit,
        stepwise,
        table,
    })
}
