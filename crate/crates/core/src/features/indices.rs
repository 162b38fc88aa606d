//! Individual document-level indices over an analyzed document.
//!
//! Incidences are per 1000 word tokens. Adjacent-sentence measures use
//! consecutive sentences within a paragraph. Functions returning
//! `Option` yield `None` where the index is undefined; the caller applies
//! the catalog default and sets the flag.

use std::collections::HashSet;

use crate::corpus::{
    ConcretenessNorms, ConnectiveCategory, ConnectiveLexicon, EmbeddingSpace, FrequencyTable,
    HypernymDepths, PhraseLexicon,
};
use crate::error::{Error, Result};
use crate::textproc::{count_syllables, AnalyzedDoc, Token};

use super::catalog::L2Coefficients;

pub const FIRST_PERSON_SINGULAR: &[&str] = &["i", "me", "my", "mine", "myself"];
pub const THIRD_PERSON_SINGULAR: &[&str] = &[
    "he", "she", "it", "him", "her", "his", "hers", "its", "himself", "herself", "itself",
];
/// log10 of the per-million frequency assigned to words missing from the table.
pub const OOV_LOG_FREQUENCY: f64 = -std::f64::consts::LOG10_2;

fn lower(t: &Token) -> String {
    t.surface.to_lowercase().replace('\u{2019}', "'")
}

fn words_or_error(doc: &AnalyzedDoc) -> Result<usize> {
    match doc.word_count() {
        0 => Err(Error::EmptyDocument),
        n => Ok(n),
    }
}

/// Occurrences per 1000 word tokens of tokens matching `predicate`.
pub fn incidence(doc: &AnalyzedDoc, predicate: impl Fn(&Token) -> bool) -> Result<f64> {
    let n = words_or_error(doc)?;
    let hits = doc.tokens.iter().flatten().filter(|t| predicate(t)).count();
    Ok(1000.0 * hits as f64 / n as f64)
}

pub fn is_first_person_singular(t: &Token) -> bool {
    FIRST_PERSON_SINGULAR.contains(&lower(t).as_str())
}

pub fn is_third_person_singular(t: &Token) -> bool {
    THIRD_PERSON_SINGULAR.contains(&lower(t).as_str())
}

pub fn is_gerund(t: &Token) -> bool {
    t.pos == "VBG"
}

/// Phrase matches per 1000 words; matching never crosses a sentence boundary.
pub fn lexicon_incidence(doc: &AnalyzedDoc, lexicons: &[&PhraseLexicon]) -> Result<f64> {
    let n = words_or_error(doc)?;
    let hits: usize = doc
        .tokens
        .iter()
        .map(|sent| {
            let lowered: Vec<String> = sent.iter().map(lower).collect();
            lexicons
                .iter()
                .map(|l| l.count_matches(&lowered))
                .sum::<usize>()
        })
        .sum();
    Ok(1000.0 * hits as f64 / n as f64)
}

pub fn connective_incidence(
    doc: &AnalyzedDoc,
    lexicon: &ConnectiveLexicon,
    categories: &[ConnectiveCategory],
) -> Result<f64> {
    let lex: Vec<&PhraseLexicon> = categories.iter().map(|&c| lexicon.get(c)).collect();
    lexicon_incidence(doc, &lex)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceStats {
    pub sentence_count: usize,
    pub mean_sentence_length: f64,
    pub mean_word_length: f64,
}

pub fn surface_stats(doc: &AnalyzedDoc) -> Result<SurfaceStats> {
    let n = words_or_error(doc)?;
    let letters: usize = doc
        .words()
        .map(|t| t.surface.chars().filter(|c| c.is_alphabetic()).count())
        .sum();
    Ok(SurfaceStats {
        sentence_count: doc.sentences.len(),
        mean_sentence_length: n as f64 / doc.sentences.len() as f64,
        mean_word_length: letters as f64 / n as f64,
    })
}

/// Type-token ratio over lowercased lemmas of word tokens.
pub fn lexical_diversity(doc: &AnalyzedDoc) -> Result<f64> {
    let n = words_or_error(doc)?;
    let types: HashSet<&str> = doc.words().map(|t| t.lemma.as_str()).collect();
    Ok(types.len() as f64 / n as f64)
}

/// log10 per-million frequency of a token: lowercased surface first, then
/// lemma, then the out-of-vocabulary floor.
pub fn log_frequency(t: &Token, table: &FrequencyTable) -> f64 {
    table
        .per_million(&lower(t))
        .or_else(|| table.per_million(&t.lemma))
        .map(f64::log10)
        .unwrap_or(OOV_LOG_FREQUENCY)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyStats {
    pub mean_log_freq_all: f64,
    /// `None` when the document has no content words.
    pub mean_log_freq_content: Option<f64>,
}

pub fn word_frequency_stats(doc: &AnalyzedDoc, table: &FrequencyTable) -> Result<FrequencyStats> {
    words_or_error(doc)?;
    let all: Vec<f64> = doc.words().map(|t| log_frequency(t, table)).collect();
    let content: Vec<f64> = doc
        .words()
        .filter(|t| t.is_content)
        .map(|t| log_frequency(t, table))
        .collect();
    Ok(FrequencyStats {
        mean_log_freq_all: mean(&all).expect("non-empty"),
        mean_log_freq_content: mean(&content),
    })
}

/// Mean over covered items plus how many items were looked up and covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub value: Option<f64>,
    pub covered: usize,
    pub total: usize,
}

impl Coverage {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }
}

fn covered_mean<'a>(
    tokens: impl Iterator<Item = &'a Token>,
    lookup: impl Fn(&str) -> Option<f64>,
) -> Coverage {
    let mut total = 0;
    let mut hits = Vec::new();
    for t in tokens {
        total += 1;
        if let Some(v) = lookup(&t.lemma) {
            hits.push(v);
        }
    }
    Coverage {
        value: mean(&hits),
        covered: hits.len(),
        total,
    }
}

/// Mean rating over content-word lemmas found in the norms.
pub fn concreteness_mean(doc: &AnalyzedDoc, norms: &ConcretenessNorms) -> Coverage {
    covered_mean(doc.words().filter(|t| t.is_content), |l| norms.get(l))
}

/// Mean hypernym depth over noun lemmas found in the table.
pub fn hypernymy_nouns(doc: &AnalyzedDoc, depths: &HypernymDepths) -> Coverage {
    covered_mean(doc.words().filter(|t| t.is_noun()), |l| depths.get(l))
}

/// Agentless passives per 1000 words: a form of "be", optional adverbs,
/// then a past participle, with no "by" later in the sentence.
pub fn passive_density(doc: &AnalyzedDoc) -> Result<f64> {
    let n = words_or_error(doc)?;
    let mut hits = 0;
    for sent in &doc.tokens {
        for i in 0..sent.len() {
            if !(sent[i].is_verb() && sent[i].lemma == "be") {
                continue;
            }
            let mut j = i + 1;
            while j < sent.len() && sent[j].is_adverb() {
                j += 1;
            }
            if j < sent.len() && sent[j].pos == "VBN" {
                let agent = sent[j + 1..].iter().any(|t| lower(t) == "by");
                if !agent {
                    hits += 1;
                }
            }
        }
    }
    Ok(1000.0 * hits as f64 / n as f64)
}

/// Maximal runs of modal/verb tokens (adverbs may sit inside a run) that
/// contain at least one verb; auxiliaries thereby merge into their verb.
pub fn verb_groups(sentence: &[Token]) -> usize {
    let mut groups = 0;
    let mut i = 0;
    while i < sentence.len() {
        let t = &sentence[i];
        if t.is_verb() || t.pos == "MD" {
            let mut has_verb = false;
            let mut j = i;
            loop {
                if sentence[j].is_verb() {
                    has_verb = true;
                }
                let mut k = j + 1;
                while k < sentence.len() && sentence[k].is_adverb() {
                    k += 1;
                }
                if k < sentence.len() && (sentence[k].is_verb() || sentence[k].pos == "MD") {
                    j = k;
                } else {
                    break;
                }
            }
            if has_verb {
                groups += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    groups
}

pub fn verb_phrase_density(doc: &AnalyzedDoc) -> Result<f64> {
    let n = words_or_error(doc)?;
    let groups: usize = doc.tokens.iter().map(|s| verb_groups(s)).sum();
    Ok(1000.0 * groups as f64 / n as f64)
}

/// (causal particles + 1) / (causal verbs + 1).
pub fn causal_ratio(
    doc: &AnalyzedDoc,
    particles: &PhraseLexicon,
    causal_verbs: &HashSet<String>,
) -> f64 {
    let particle_hits: usize = doc
        .tokens
        .iter()
        .map(|sent| {
            let lowered: Vec<String> = sent.iter().map(lower).collect();
            particles.count_matches(&lowered)
        })
        .sum();
    let verb_hits = doc
        .tokens
        .iter()
        .flatten()
        .filter(|t| t.is_verb() && causal_verbs.contains(&t.lemma))
        .count();
    (particle_hits as f64 + 1.0) / (verb_hits as f64 + 1.0)
}

/// Mean over adjacent in-paragraph pairs of the share of the pair's content
/// tokens whose lemma also occurs among the other sentence's content lemmas.
pub fn content_word_overlap(doc: &AnalyzedDoc) -> Option<f64> {
    let lemmas = |i: usize| -> Vec<&str> {
        doc.tokens[i]
            .iter()
            .filter(|t| t.is_content)
            .map(|t| t.lemma.as_str())
            .collect()
    };
    let values: Vec<f64> = doc
        .adjacent_pairs()
        .into_iter()
        .filter_map(|(a, b)| {
            let (la, lb) = (lemmas(a), lemmas(b));
            let total = la.len() + lb.len();
            if total == 0 {
                return None;
            }
            let sa: HashSet<&str> = la.iter().copied().collect();
            let sb: HashSet<&str> = lb.iter().copied().collect();
            let shared = la.iter().filter(|l| sb.contains(*l)).count()
                + lb.iter().filter(|l| sa.contains(*l)).count();
            Some(shared as f64 / total as f64)
        })
        .collect();
    mean(&values)
}

/// Mean over adjacent in-paragraph pairs of min/max sentence length in words.
pub fn syntactic_similarity(doc: &AnalyzedDoc) -> Option<f64> {
    let len = |i: usize| doc.sentence_words(i).count() as f64;
    let values: Vec<f64> = doc
        .adjacent_pairs()
        .into_iter()
        .filter_map(|(a, b)| {
            let (x, y) = (len(a), len(b));
            let hi = x.max(y);
            (hi > 0.0).then(|| x.min(y) / hi)
        })
        .collect();
    mean(&values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsaMode {
    AdjacentSentences,
    AllSentencesInParagraph,
    Verbs,
}

fn embedding_of<'a>(t: &Token, space: &'a EmbeddingSpace) -> Option<&'a [f64]> {
    space.get(&t.lemma).or_else(|| space.get(&lower(t)))
}

/// Mean of the embeddings of the selected tokens; zero vector if none is covered.
fn sentence_vector(
    tokens: &[Token],
    space: &EmbeddingSpace,
    select: impl Fn(&Token) -> bool,
) -> Vec<f64> {
    let mut v = vec![0.0; space.dim()];
    let mut n = 0;
    for t in tokens.iter().filter(|t| select(t)) {
        if let Some(e) = embedding_of(t, space) {
            for (a, b) in v.iter_mut().zip(e) {
                *a += b;
            }
            n += 1;
        }
    }
    if n > 0 {
        for a in &mut v {
            *a /= n as f64;
        }
    }
    v
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity, `None` if either vector is zero. Clamped to [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

pub fn sentence_vectors(
    doc: &AnalyzedDoc,
    space: &EmbeddingSpace,
    verbs_only: bool,
) -> Vec<Vec<f64>> {
    doc.tokens
        .iter()
        .map(|s| sentence_vector(s, space, |t| t.is_content && (!verbs_only || t.is_verb())))
        .collect()
}

/// Mean cosine over the mode's sentence pairs. Pairs with a zero vector are
/// excluded; `None` if no pair remains.
pub fn lsa_overlap(doc: &AnalyzedDoc, space: &EmbeddingSpace, mode: LsaMode) -> Option<f64> {
    let vectors = sentence_vectors(doc, space, mode == LsaMode::Verbs);
    match mode {
        LsaMode::AdjacentSentences | LsaMode::Verbs => {
            let values: Vec<f64> = doc
                .adjacent_pairs()
                .into_iter()
                .filter_map(|(a, b)| cosine(&vectors[a], &vectors[b]))
                .collect();
            mean(&values)
        }
        LsaMode::AllSentencesInParagraph => {
            let per_paragraph: Vec<f64> = doc
                .paragraphs
                .iter()
                .filter_map(|p| {
                    let mut values = Vec::new();
                    for a in p.clone() {
                        for b in a + 1..p.end {
                            if let Some(c) = cosine(&vectors[a], &vectors[b]) {
                                values.push(c);
                            }
                        }
                    }
                    mean(&values)
                })
                .collect();
            mean(&per_paragraph)
        }
    }
}

/// Mean over sentences i ≥ 2 of the cosine between sentence i and the mean
/// vector of all earlier sentences. Zero vectors are skipped.
pub fn givenness(doc: &AnalyzedDoc, space: &EmbeddingSpace) -> Option<f64> {
    let vectors = sentence_vectors(doc, space, false);
    let mut sum = vec![0.0; space.dim()];
    let mut seen = 0usize;
    let mut values = Vec::new();
    for v in &vectors {
        if norm(v) == 0.0 {
            continue;
        }
        if seen > 0 {
            let prior: Vec<f64> = sum.iter().map(|s| s / seen as f64).collect();
            if let Some(c) = cosine(v, &prior) {
                values.push(c);
            }
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        seen += 1;
    }
    mean(&values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readability {
    pub flesch_reading_ease: f64,
    pub flesch_kincaid_grade: f64,
    /// `None` when content-word overlap, sentence similarity or content
    /// frequency is undefined.
    pub l2: Option<f64>,
}

pub fn readability(
    doc: &AnalyzedDoc,
    table: &FrequencyTable,
    coef: &L2Coefficients,
) -> Result<Readability> {
    let n = words_or_error(doc)?;
    let syllables: usize = doc.words().map(|t| count_syllables(&t.surface)).sum();
    let wps = n as f64 / doc.sentences.len() as f64;
    let spw = syllables as f64 / n as f64;
    let freq = word_frequency_stats(doc, table)?.mean_log_freq_content;
    let l2 = match (content_word_overlap(doc), syntactic_similarity(doc), freq) {
        (Some(o), Some(s), Some(f)) => {
            Some(coef.intercept + coef.overlap * o + coef.syntax * s + coef.frequency * f)
        }
        _ => None,
    };
    Ok(Readability {
        flesch_reading_ease: 206.835 - 1.015 * wps - 84.6 * spw,
        flesch_kincaid_grade: 0.39 * wps + 11.8 * spw - 15.59,
        l2,
    })
}

pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
