//! Line-delimited prediction records shared with external classifiers.
//!
//! One JSON object per line, keys in this order:
//! `{"articleId":"a1","fold":3,"trueLabel":"fake","predictedLabel":"satire","score":0.73,"method":"mnb"}`.
//! Labels are lowercase; a higher score is more Satire-like.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::folds::{preview, SplitPlan};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Prediction {
    pub article_id: String,
    pub fold: usize,
    pub true_label: Label,
    pub predicted_label: Label,
    pub score: f64,
    pub method: String,
}

pub fn predictions_to_string(predictions: &[Prediction]) -> Result<String> {
    let mut out = String::new();
    for p in predictions {
        if !p.score.is_finite() {
            return Err(Error::Validation(format!(
                "non-finite score for `{}`",
                p.article_id
            )));
        }
        let line = serde_json::to_string(p).map_err(|e| Error::Validation(e.to_string()))?;
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<Prediction>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}

pub fn write_predictions(predictions: &[Prediction], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, predictions_to_string(predictions)?).map_err(|e| Error::io(path, e))
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, path)
}

/// Problems found by [`validate_predictions`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionProblems {
    pub duplicates: Vec<String>,
    pub missing: Vec<String>,
    pub unknown: Vec<String>,
    pub fold_mismatch: Vec<String>,
    pub label_mismatch: Vec<String>,
    pub methods: Vec<String>,
    /// Some Fake prediction scores above some Satire prediction.
    pub threshold_inconsistent: bool,
    pub non_finite: Vec<String>,
}

impl PredictionProblems {
    pub fn is_empty(&self) -> bool {
        self.duplicates.is_empty()
            && self.missing.is_empty()
            && self.unknown.is_empty()
            && self.fold_mismatch.is_empty()
            && self.label_mismatch.is_empty()
            && self.non_finite.is_empty()
            && !self.threshold_inconsistent
            && self.methods.len() == 1
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        let mut list = |what: &str, ids: &[String]| {
            if !ids.is_empty() {
                let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
                parts.push(format!("{} {what} [{}]", ids.len(), preview(&refs)));
            }
        };
        list("duplicate ids", &self.duplicates);
        list("missing ids", &self.missing);
        list("ids not in the fold plan", &self.unknown);
        list("ids in the wrong fold", &self.fold_mismatch);
        list("ids with the wrong true label", &self.label_mismatch);
        list("non-finite scores", &self.non_finite);
        if self.methods.len() != 1 {
            parts.push(format!(
                "expected one method, found [{}]",
                self.methods.join(", ")
            ));
        }
        if self.threshold_inconsistent {
            parts.push("predicted labels are not a threshold of the score".into());
        }
        parts.join("; ")
    }
}

/// Checks a single method's predictions against the fold plan and, when
/// given, the true labels: every planned id exactly once, in its planned
/// fold, with a consistent label, and predicted labels that split the scores
/// at a single threshold.
pub fn validate_predictions(
    predictions: &[Prediction],
    plan: &SplitPlan,
    truth: Option<&HashMap<String, Label>>,
) -> PredictionProblems {
    let mut problems = PredictionProblems::default();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut methods: Vec<String> = Vec::new();
    let mut max_fake = f64::NEG_INFINITY;
    let mut min_satire = f64::INFINITY;
    for p in predictions {
        *seen.entry(&p.article_id).or_default() += 1;
        if !methods.contains(&p.method) {
            methods.push(p.method.clone());
        }
        if !p.score.is_finite() {
            problems.non_finite.push(p.article_id.clone());
        }
        match plan.fold_of(&p.article_id) {
            None => problems.unknown.push(p.article_id.clone()),
            Some(f) if f != p.fold => problems.fold_mismatch.push(p.article_id.clone()),
            _ => {}
        }
        if let Some(t) = truth.and_then(|t| t.get(&p.article_id)) {
            if *t != p.true_label {
                problems.label_mismatch.push(p.article_id.clone());
            }
        }
        match p.predicted_label {
            Label::Fake => max_fake = max_fake.max(p.score),
            Label::Satire => min_satire = min_satire.min(p.score),
        }
    }
    problems.duplicates = seen
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(id, _)| id.to_string())
        .collect();
    problems.missing = plan
        .ids()
        .iter()
        .filter(|id| !seen.contains_key(id.as_str()))
        .cloned()
        .collect();
    problems.threshold_inconsistent = max_fake > min_satire;
    problems.methods = methods;
    problems
}

pub fn check_predictions(
    predictions: &[Prediction],
    plan: &SplitPlan,
    truth: Option<&HashMap<String, Label>>,
) -> Result<()> {
    let problems = validate_predictions(predictions, plan, truth);
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "invalid predictions: {}",
            problems.describe()
        )))
    }
}
