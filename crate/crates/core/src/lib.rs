//! Linguistic coherence features, statistical analysis and cross-validated
//! classifiers for telling fake news stories apart from satire.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`]: labelled articles, lexical resources and feature-table I/O
//! * [`textproc`]: segmentation, tokenization, tagging, lemmatization
//! * [`features`]: per-article coherence, readability and lexical indices
//! * [`stats`]: standardization, PCA with varimax, logistic regression, stepwise selection
//! * [`classify`]: stratified folds, naive Bayes and linear SVM, metrics, paired t-test

pub mod classify;
pub mod corpus;
pub mod error;
pub mod features;
pub mod matrix;
pub mod stats;
pub mod textproc;

pub use error::{Error, ErrorKind, Result};
pub use matrix::FeatureMatrix;
