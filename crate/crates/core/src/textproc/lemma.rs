//! Rule + exception-table lemmatizer over a bundled lemma list.
//!
//! Lookup order for a word with a mappable tag: clitic table, exception
//! table, the word itself if it is a known lemma, then detachment rules
//! (first candidate that is a known lemma wins). Anything else falls back to
//! the lowercased word.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

const EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions.tsv");
const LEMMAS: &str = include_str!("../../data/lemmas.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum WordClass {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl WordClass {
    fn from_code(code: &str) -> Option<Self> {
        match code {
            "n" => Some(WordClass::Noun),
            "v" => Some(WordClass::Verb),
            "a" => Some(WordClass::Adj),
            "r" => Some(WordClass::Adv),
            _ => None,
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        if tag.starts_with("NN") {
            Some(WordClass::Noun)
        } else if tag.starts_with("VB") {
            Some(WordClass::Verb)
        } else if tag.starts_with("JJ") {
            Some(WordClass::Adj)
        } else if tag.starts_with("RB") {
            Some(WordClass::Adv)
        } else {
            None
        }
    }

    fn rules(self) -> &'static [(&'static str, &'static str)] {
        match self {
            WordClass::Noun => &[
                ("s", ""),
                ("ses", "s"),
                ("xes", "x"),
                ("zes", "z"),
                ("ches", "ch"),
                ("shes", "sh"),
                ("men", "man"),
                ("ies", "y"),
            ],
            WordClass::Verb => &[
                ("s", ""),
                ("ies", "y"),
                ("es", "e"),
                ("es", ""),
                ("ed", "e"),
                ("ed", ""),
                ("ing", "e"),
                ("ing", ""),
            ],
            WordClass::Adj => &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
            WordClass::Adv => &[],
        }
    }
}

struct Tables {
    exceptions: HashMap<(WordClass, String), String>,
    lemmas: HashSet<(WordClass, String)>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exceptions = HashMap::new();
        for line in EXCEPTIONS.lines() {
            let mut f = line.split('\t');
            if let (Some(p), Some(form), Some(lemma)) = (f.next(), f.next(), f.next()) {
                if let Some(wc) = WordClass::from_code(p) {
                    exceptions
                        .entry((wc, form.to_string()))
                        .or_insert_with(|| lemma.to_string());
                }
            }
        }
        let mut lemmas = HashSet::new();
        for line in LEMMAS.lines() {
            if let Some((p, lemma)) = line.split_once('\t') {
                if let Some(wc) = WordClass::from_code(p) {
                    lemmas.insert((wc, lemma.to_string()));
                }
            }
        }
        Tables { exceptions, lemmas }
    })
}

fn clitic_lemma(lower: &str, tag: &str) -> Option<&'static str> {
    Some(match lower {
        "n't" => "not",
        "ca" if tag == "MD" => "can",
        "wo" if tag == "MD" => "will",
        "'ll" => "will",
        "'ve" => "have",
        "'d" if tag == "VBD" => "have",
        "'d" => "would",
        "'re" | "'m" => "be",
        "'s" if tag.starts_with("VB") => "be",
        _ => return None,
    })
}

/// Lemma of `word` given its treebank tag; always lowercase and non-empty
/// for non-empty input.
pub fn lemmatize(word: &str, tag: &str) -> String {
    let lower = word.to_lowercase().replace('\u{2019}', "'");
    if let Some(l) = clitic_lemma(&lower, tag) {
        return l.to_string();
    }
    let Some(wc) = WordClass::from_tag(tag) else {
        return lower;
    };
    let t = tables();
    if let Some(l) = t.exceptions.get(&(wc, lower.clone())) {
        return l.clone();
    }
    if t.lemmas.contains(&(wc, lower.clone())) {
        return lower;
    }
    for &(suffix, repl) in wc.rules() {
        if let Some(stem) = lower.strip_suffix(suffix) {
            if stem.is_empty() {
                continue;
            }
            let cand = format!("{stem}{repl}");
            if t.lemmas.contains(&(wc, cand.clone())) {
                return cand;
            }
            // doubled final consonant: running → run, stopped → stop
            if repl.is_empty() && matches!(suffix, "ing" | "ed" | "er" | "est") {
                let b = stem.as_bytes();
                if b.len() >= 2
                    && b[b.len() - 1] == b[b.len() - 2]
                    && !b"aeiou".contains(&b[b.len() - 1])
                {
                    let short = &stem[..stem.len() - 1];
                    if t.lemmas.contains(&(wc, short.to_string())) {
                        return short.to_string();
                    }
                }
            }
        }
    }
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_cases() {
        assert_eq!(lemmatize("ran", "VBD"), "run");
        assert_eq!(lemmatize("cats", "NNS"), "cat");
        assert_eq!(lemmatize("the", "DT"), "the");
    }

    #[test]
    fn rules_and_exceptions() {
        assert_eq!(lemmatize("running", "VBG"), "run");
        assert_eq!(lemmatize("was", "VBD"), "be");
        assert_eq!(lemmatize("children", "NNS"), "child");
        assert_eq!(lemmatize("boxes", "NNS"), "box");
        assert_eq!(lemmatize("studies", "VBZ"), "study");
        assert_eq!(lemmatize("bigger", "JJR"), "big");
        assert_eq!(lemmatize("Glass", "NN"), "glass");
        assert_eq!(lemmatize("passed", "VBN"), "pass");
    }

    #[test]
    fn clitics() {
        assert_eq!(lemmatize("n't", "RB"), "not");
        assert_eq!(lemmatize("ca", "MD"), "can");
        assert_eq!(lemmatize("'s", "VBZ"), "be");
        assert_eq!(lemmatize("'s", "POS"), "'s");
        assert_eq!(lemmatize("\u{2019}re", "VBP"), "be");
    }

    #[test]
    fn unknown_words_fall_back_to_lowercase() {
        assert_eq!(lemmatize("Zxqwv", "NNP"), "zxqwv");
        assert_eq!(lemmatize("\u{1f600}", "NN"), "\u{1f600}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn total_and_non_empty(word in "\\PC{1,12}", tag in "(NN|NNS|VB|VBD|VBG|JJ|RB|DT|MD|POS)") {
                let l = lemmatize(&word, &tag);
                prop_assert!(!l.is_empty());
                prop_assert_eq!(l.to_lowercase(), l.clone());
            }
        }
    }
}
