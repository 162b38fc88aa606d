//! Stratified folds, naive Bayes and linear SVM classifiers, fold metrics,
//! paired t-tests and the method comparison table.

mod cv;
mod evaluate;
mod folds;
mod mnb;
mod predictions;
mod svm;

pub use cv::{cross_validate_mnb, cross_validate_svm, FeatureSet, SvmFoldInfo, SvmRun, MNB_METHOD};
pub use evaluate::{
    compare_methods, evaluate, paired_ttest, paired_ttest_values, ComparisonRow, ComparisonTable,
    Confusion, EvalReport, FoldMetrics, Prf, TTest, COMPARISON_ALPHA,
};
pub use folds::{make_folds, read_folds, write_folds, SplitPlan};
pub use mnb::{bag_of_words, train_mnb, train_mnb_tokens, MnbModel};
pub use predictions::{
    check_predictions, parse_predictions, predictions_to_string, read_predictions,
    validate_predictions, write_predictions, Prediction, PredictionProblems,
};
pub use svm::{train_svm, SvmModel, SvmParams};
