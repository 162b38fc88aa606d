//! Standardization, correlation PCA with varimax rotation, logistic
//! regression with Wald tests and backward elimination.

mod analysis;
mod eigen;
mod logistic;
mod pca;
mod report;
mod standardize;
mod stepwise;

pub use analysis::{analyze_matrix, Analysis, AnalysisOptions};
pub use eigen::{symmetric_eigen, MAX_SWEEPS};
pub use logistic::{
    fit_logistic, fit_logistic_with, normal_two_sided_p, Coefficient, LogisticOptions,
    RegressionFit, INTERCEPT,
};
pub use pca::{
    fit_pca, project_scores, varimax_criterion, varimax_rotate, PcaModel, EIGENVALUE_FLOOR,
};
pub use report::{
    component_labels, direction_check, fit_to_string, parse_fit, parse_pca, pca_to_string,
    significance_table, stars, DirectionCheck, DirectionEntry, SignificanceRow, SignificanceTable,
    MIN_DIRECTION_AGREEMENT, REFERENCE_DIRECTIONS, SIGNIFICANCE_LEVEL,
};
pub use standardize::{apply_standardization, column_mean_sd, standardize, Standardized};
pub use stepwise::{stepwise_backward, Removal, StepwiseResult};
