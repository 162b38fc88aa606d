//! Cross-validated predictions for the built-in classifiers.

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::SplitPlan;
use super::mnb::{bag_of_words, train_mnb_tokens};
use super::predictions::Prediction;
use super::svm::{train_svm, SvmParams};
use crate::corpus::{Article, Label};
use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, Standardization};
use crate::stats::{analyze_matrix, project_scores, AnalysisOptions};

pub const MNB_METHOD: &str = "mnb";

/// Which feature columns the SVM sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    /// Every index in the table.
    Raw,
    /// Component scores of the training fold's PCA model.
    Pca,
    /// Indices dominating the components kept by backward elimination on
    /// the training fold.
    Survivors,
}

impl FeatureSet {
    pub fn method_name(self) -> &'static str {
        match self {
            FeatureSet::Raw => "svm-raw",
            FeatureSet::Pca => "svm-pca",
            FeatureSet::Survivors => "svm-coh",
        }
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FeatureSet::Raw),
            "pca" => Ok(FeatureSet::Pca),
            "survivors" => Ok(FeatureSet::Survivors),
            other => Err(Error::Config(format!(
                "unknown feature set `{other}` (raw, pca, survivors)"
            ))),
        }
    }
}

fn fold_members(plan: &SplitPlan, ids: &[String], fold: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        match plan.fold_of(id) {
            Some(f) if f == fold => test.push(i),
            Some(_) => train.push(i),
            None => return Err(Error::Validation(format!("article `{id}` has no fold"))),
        }
    }
    Ok((train, test))
}

fn assemble(mut per_fold: Vec<Vec<(usize, Prediction)>>, n: usize) -> Vec<Prediction> {
    let mut slots: Vec<Option<Prediction>> = vec![None; n];
    for fold in per_fold.drain(..) {
        for (i, p) in fold {
            slots[i] = Some(p);
        }
    }
    slots.into_iter().flatten().collect()
}

/// Ten-fold (per `plan`) naive Bayes predictions in article order.
pub fn cross_validate_mnb(articles: &[Article], plan: &SplitPlan) -> Result<Vec<Prediction>> {
    plan.check_covers(articles.iter().map(|a| a.id.as_str()))?;
    let ids: Vec<String> = articles.iter().map(|a| a.id.clone()).collect();
    let bags: Vec<Vec<String>> = articles
        .par_iter()
        .map(|a| bag_of_words(&a.full_text()))
        .collect();
    let per_fold = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let (train, test) = fold_members(plan, &ids, fold)?;
            let docs: Vec<(Label, Vec<String>)> = train
                .iter()
                .map(|&i| (articles[i].label, bags[i].clone()))
                .collect();
            let model = train_mnb_tokens(&docs)?;
            Ok(test
                .into_iter()
                .map(|i| {
                    let (label, score) = model.predict_tokens(&bags[i]);
                    (
                        i,
                        Prediction {
                            article_id: ids[i].clone(),
                            fold,
                            true_label: articles[i].label,
                            predicted_label: label,
                            score,
                            method: MNB_METHOD.into(),
                        },
                    )
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(per_fold, ids.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmFoldInfo {
    pub fold: usize,
    pub columns: Vec<String>,
    /// Training-fold means and sds the fold's model standardizes with.
    pub standardization: Standardization,
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmRun {
    pub predictions: Vec<Prediction>,
    pub folds: Vec<SvmFoldInfo>,
}

/// Cross-validated SVM predictions in matrix row order. Feature selection,
/// standardization and fitting see only the training rows of each fold.
pub fn cross_validate_svm(
    matrix: &FeatureMatrix,
    labels: &HashMap<String, Label>,
    plan: &SplitPlan,
    params: &SvmParams,
    features: FeatureSet,
    analysis: &AnalysisOptions,
) -> Result<SvmRun> {
    plan.check_covers(matrix.row_ids.iter().map(String::as_str))?;
    let y: Vec<Label> = matrix
        .row_ids
        .iter()
        .map(|id| {
            labels
                .get(id)
                .copied()
                .ok_or_else(|| Error::Validation(format!("no label for article `{id}`")))
        })
        .collect::<Result<_>>()?;
    let method = features.method_name();
    let results = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let (train, test) = fold_members(plan, &matrix.row_ids, fold)?;
            let train_x = matrix.select_rows(&train);
            let test_x = matrix.select_rows(&test);
            let train_y: Vec<Label> = train.iter().map(|&i| y[i]).collect();
            let (train_x, test_x) = match features {
                FeatureSet::Raw => (train_x, test_x),
                FeatureSet::Survivors | FeatureSet::Pca => {
                    let binary: Vec<u8> = train_y.iter().map(|l| l.as_binary() as u8).collect();
                    let a = analyze_matrix(&train_x, &binary, analysis)?;
                    if features == FeatureSet::Pca {
                        (
                            project_scores(&train_x, &a.pca)?,
                            project_scores(&test_x, &a.pca)?,
                        )
                    } else {
                        let cols = a.survivor_indices();
                        (
                            train_x.select_columns(&cols)?,
                            test_x.select_columns(&cols)?,
                        )
                    }
                }
            };
            let model = train_svm(&train_x, &train_y, params)?;
            let preds = model.predict_matrix(&test_x)?;
            let out: Vec<(usize, Prediction)> = test
                .iter()
                .zip(preds)
                .map(|(&i, (label, score))| {
                    (
                        i,
                        Prediction {
                            article_id: matrix.row_ids[i].clone(),
                            fold,
                            true_label: y[i],
                            predicted_label: label,
                            score,
                            method: method.into(),
                        },
                    )
                })
                .collect();
            let info = SvmFoldInfo {
                fold,
                columns: train_x.column_names.clone(),
                standardization: model.standardization.clone(),
                objective_trace: model.objective_trace.clone(),
            };
            Ok((out, info))
        })
        .collect::<Result<Vec<_>>>()?;
    let (per_fold, folds): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(SvmRun {
        predictions: assemble(per_fold, matrix.nrows()),
        folds,
    })
}
