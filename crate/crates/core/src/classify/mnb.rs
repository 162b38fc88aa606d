//! Multinomial naive Bayes over lowercased word tokens.

use std::collections::BTreeMap;

use crate::corpus::{Article, Label};
use crate::error::{Error, Result};
use crate::textproc::{tokenize, Span};

/// Lowercased word tokens of headline and body; punctuation is dropped.
pub fn bag_of_words(text: &str) -> Vec<String> {
    tokenize(text, Span::new(0, text.len()))
        .into_iter()
        .map(|s| &text[s.start..s.end])
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MnbModel {
    pub vocabulary: BTreeMap<String, usize>,
    /// Indexed by [`Label::index`].
    pub log_priors: [f64; 2],
    /// Add-one smoothed log P(word | class), indexed by class then word.
    pub log_likelihoods: [Vec<f64>; 2],
}

pub fn train_mnb(articles: &[&Article]) -> Result<MnbModel> {
    let docs: Vec<(Label, Vec<String>)> = articles
        .iter()
        .map(|a| (a.label, bag_of_words(&a.full_text())))
        .collect();
    train_mnb_tokens(&docs)
}

pub fn train_mnb_tokens(docs: &[(Label, Vec<String>)]) -> Result<MnbModel> {
    let mut doc_counts = [0usize; 2];
    for (label, _) in docs {
        doc_counts[label.index()] += 1;
    }
    if doc_counts.contains(&0) {
        return Err(Error::Validation(
            "naive Bayes training needs both classes".into(),
        ));
    }
    let mut vocabulary = BTreeMap::new();
    for (_, toks) in docs {
        for t in toks {
            vocabulary.entry(t.clone()).or_insert(0);
        }
    }
    if vocabulary.is_empty() {
        return Err(Error::Validation("naive Bayes vocabulary is empty".into()));
    }
    for (i, v) in vocabulary.values_mut().enumerate() {
        *v = i;
    }
    let v = vocabulary.len();
    let mut counts = [vec![0u64; v], vec![0u64; v]];
    for (label, toks) in docs {
        for t in toks {
            counts[label.index()][vocabulary[t]] += 1;
        }
    }
    let total = docs.len() as f64;
    let log_priors = [
        (doc_counts[0] as f64 / total).ln(),
        (doc_counts[1] as f64 / total).ln(),
    ];
    let smooth = |c: &Vec<u64>| -> Vec<f64> {
        let denom = (c.iter().sum::<u64>() as f64 + v as f64).ln();
        c.iter().map(|&n| (n as f64 + 1.0).ln() - denom).collect()
    };
    Ok(MnbModel {
        log_likelihoods: [smooth(&counts[0]), smooth(&counts[1])],
        vocabulary,
        log_priors,
    })
}

impl MnbModel {
    /// Unnormalized class log scores; unseen words are ignored.
    pub fn joint_log_scores(&self, tokens: &[String]) -> [f64; 2] {
        let mut s = self.log_priors;
        for t in tokens {
            if let Some(&j) = self.vocabulary.get(t) {
                s[0] += self.log_likelihoods[0][j];
                s[1] += self.log_likelihoods[1][j];
            }
        }
        s
    }

    /// Normalized log posteriors, indexed by [`Label::index`].
    pub fn log_posteriors(&self, tokens: &[String]) -> [f64; 2] {
        let s = self.joint_log_scores(tokens);
        let m = s[0].max(s[1]);
        let lse = m + ((s[0] - m).exp() + (s[1] - m).exp()).ln();
        [s[0] - lse, s[1] - lse]
    }

    /// Predicted label and posterior probability of Satire. Exact ties go
    /// to the class with the larger prior, then to Fake.
    pub fn predict_tokens(&self, tokens: &[String]) -> (Label, f64) {
        let lp = self.log_posteriors(tokens);
        let label = if lp[1] > lp[0] || (lp[1] == lp[0] && self.log_priors[1] > self.log_priors[0])
        {
            Label::Satire
        } else {
            Label::Fake
        };
        (label, lp[1].exp())
    }

    pub fn predict(&self, article: &Article) -> (Label, f64) {
        self.predict_tokens(&bag_of_words(&article.full_text()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bag_of_words_drops_punctuation() {
        assert_eq!(
            bag_of_words("Hello, World! It's 5."),
            ["hello", "world", "it", "'s", "5"]
        );
    }

    #[test]
    fn needs_both_classes_and_words() {
        let docs = vec![(Label::Fake, vec!["a".to_string()])];
        assert!(train_mnb_tokens(&docs).is_err());
        let docs = vec![(Label::Fake, vec![]), (Label::Satire, vec![])];
        assert!(train_mnb_tokens(&docs).is_err());
    }
}
