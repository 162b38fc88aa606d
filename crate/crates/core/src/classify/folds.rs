use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Article, Label};
use crate::error::{Error, Result};

/// Stratified assignment of articles to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub k: usize,
    pub seed: u64,
    ids: Vec<String>,
    folds: Vec<usize>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FoldRecord {
    #[serde(rename = "articleId")]
    article_id: String,
    fold: usize,
}

impl SplitPlan {
    pub fn from_assignment(k: usize, seed: u64, assignment: Vec<(String, usize)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Validation(format!("k must be at least 2, got {k}")));
        }
        let mut index = HashMap::new();
        let mut ids = Vec::with_capacity(assignment.len());
        let mut folds = Vec::with_capacity(assignment.len());
        for (i, (id, fold)) in assignment.into_iter().enumerate() {
            if fold >= k {
                return Err(Error::Validation(format!(
                    "article `{id}` has fold {fold} ≥ k = {k}"
                )));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id));
            }
            ids.push(id);
            folds.push(fold);
        }
        Ok(SplitPlan {
            k,
            seed,
            ids,
            folds,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).map(|&i| self.folds[i])
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn assignment(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.folds.iter().copied())
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    /// Checks that the plan covers exactly the given ids.
    pub fn check_covers<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let given: BTreeSet<&str> = ids.into_iter().collect();
        let planned: BTreeSet<&str> = self.ids.iter().map(String::as_str).collect();
        let missing: Vec<&str> = given.difference(&planned).copied().collect();
        let extra: Vec<&str> = planned.difference(&given).copied().collect();
        if missing.is_empty() && extra.is_empty() {
            return Ok(());
        }
        Err(Error::Validation(format!(
            "fold plan does not match corpus: {} ids without a fold [{}], {} unknown ids [{}]",
            missing.len(),
            preview(&missing),
            extra.len(),
            preview(&extra)
        )))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (id, fold) in self.assignment() {
            w.serialize(FoldRecord {
                article_id: id.to_string(),
                fold,
            })
            .map_err(|e| Error::Validation(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Validation(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Parses `articleId,fold` rows; `k` is taken as one more than the
    /// largest fold index.
    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut assignment = Vec::new();
        for (i, rec) in r.deserialize::<FoldRecord>().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
            assignment.push((rec.article_id, rec.fold));
        }
        let k = assignment.iter().map(|(_, f)| f + 1).max().unwrap_or(0);
        SplitPlan::from_assignment(k, 0, assignment)
    }
}

pub(crate) fn preview(ids: &[&str]) -> String {
    const SHOW: usize = 10;
    let mut s = ids
        .iter()
        .take(SHOW)
        .copied()
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOW {
        s.push_str(", ...");
    }
    s
}

/// Seeded stratified folds: each class is shuffled and dealt round-robin,
/// the dealing position carrying over from one class to the next so fold
/// sizes stay balanced as well.
pub fn make_folds(articles: &[Article], k: usize, seed: u64) -> Result<SplitPlan> {
    if k < 2 {
        return Err(Error::Validation(format!("k must be at least 2, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0usize; articles.len()];
    let mut offset = 0;
    for label in Label::ALL {
        let mut members: Vec<usize> = (0..articles.len())
            .filter(|&i| articles[i].label == label)
            .collect();
        if members.len() < k {
            return Err(Error::Validation(format!(
                "class {label} has {} articles, fewer than k = {k}",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            fold[i] = (offset + j) % k;
        }
        offset = (offset + members.len()) % k;
    }
    SplitPlan::from_assignment(
        k,
        seed,
        articles
            .iter()
            .zip(fold)
            .map(|(a, f)| (a.id.clone(), f))
            .collect(),
    )
}

pub fn write_folds(plan: &SplitPlan, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, plan.to_csv()?).map_err(|e| Error::io(path, e))
}

pub fn read_folds(path: impl AsRef<Path>) -> Result<SplitPlan> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SplitPlan::from_csv(&text, path)
}
