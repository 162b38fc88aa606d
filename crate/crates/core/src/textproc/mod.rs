//! Text analysis substrate: paragraphs, sentences, tokens, tags and lemmas.
//!
//! All spans are byte offsets into the analyzed text.

mod lemma;
mod segment;
mod syllable;
mod tagger;
mod tokenize;

use std::ops::Range;

pub use lemma::lemmatize;
pub use segment::{segment_paragraphs, segment_sentences};
pub use syllable::count_syllables;
pub use tagger::{parse_training_text, treebank_form, Tagger, TrainConfig, MODEL_HEADER};
pub use tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    pub span: Span,
    pub is_content: bool,
}

impl Token {
    /// Words are tokens with at least one letter or digit.
    pub fn is_word(&self) -> bool {
        self.surface.chars().any(char::is_alphanumeric)
    }

    pub fn is_noun(&self) -> bool {
        self.pos.starts_with("NN")
    }

    pub fn is_verb(&self) -> bool {
        self.pos.starts_with("VB")
    }

    pub fn is_adverb(&self) -> bool {
        self.pos.starts_with("RB")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedDoc {
    pub text: String,
    pub sentences: Vec<Span>,
    /// `tokens[i]` holds the tokens of `sentences[i]`.
    pub tokens: Vec<Vec<Token>>,
    /// Sentence-index ranges; they partition `0..sentences.len()`.
    pub paragraphs: Vec<Range<usize>>,
}

impl AnalyzedDoc {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().flatten().filter(|t| t.is_word())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn sentence_words(&self, i: usize) -> impl Iterator<Item = &Token> {
        self.tokens[i].iter().filter(|t| t.is_word())
    }

    /// Index pairs of consecutive sentences within the same paragraph.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        self.paragraphs
            .iter()
            .flat_map(|p| (p.start..p.end.saturating_sub(1)).map(|i| (i, i + 1)))
            .collect()
    }
}

/// Segments, tokenizes, tags and lemmatizes `text`.
pub fn analyze(text: &str, tagger: &Tagger) -> AnalyzedDoc {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut paragraphs = Vec::new();
    for para in segment_paragraphs(text) {
        let first = sentences.len();
        for sent in segment::segment_within(text, para) {
            let spans = tokenize(text, sent);
            tokens.push(analyze_sentence(text, &spans, tagger));
            sentences.push(sent);
        }
        if sentences.len() > first {
            paragraphs.push(first..sentences.len());
        }
    }
    AnalyzedDoc {
        text: text.to_string(),
        sentences,
        tokens,
        paragraphs,
    }
}

/// Builds a document from pre-tagged text: `word/TAG` tokens separated by
/// spaces, one sentence per line, paragraphs separated by blank lines. The
/// document text is the words joined by single spaces.
pub fn analyze_pretagged(tagged: &str) -> AnalyzedDoc {
    let mut text = String::new();
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut paragraphs = Vec::new();
    for block in tagged.split("\n\n") {
        let first = sentences.len();
        for line in block.lines().filter(|l| !l.trim().is_empty()) {
            if !text.is_empty() {
                text.push_str(if sentences.len() == first {
                    "\n\n"
                } else {
                    " "
                });
            }
            let start = text.len();
            let mut sent = Vec::new();
            for (k, item) in line.split_whitespace().enumerate() {
                let (word, tag) = item.rsplit_once('/').unwrap_or((item, "NN"));
                if k > 0 {
                    text.push(' ');
                }
                let span = Span::new(text.len(), text.len() + word.len());
                text.push_str(word);
                sent.push(Token {
                    surface: word.to_string(),
                    lemma: lemmatize(word, tag),
                    pos: tag.to_string(),
                    span,
                    is_content: false,
                });
            }
            for i in 0..sent.len() {
                sent[i].is_content = is_content(&sent, i);
            }
            sentences.push(Span::new(start, text.len()));
            tokens.push(sent);
        }
        if sentences.len() > first {
            paragraphs.push(first..sentences.len());
        }
    }
    AnalyzedDoc {
        text,
        sentences,
        tokens,
        paragraphs,
    }
}

fn analyze_sentence(text: &str, spans: &[Span], tagger: &Tagger) -> Vec<Token> {
    let forms: Vec<&str> = spans
        .iter()
        .map(|s| {
            let opening = s.start == 0
                || text[..s.start]
                    .chars()
                    .next_back()
                    .is_some_and(char::is_whitespace)
                || text[s.end..]
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_alphanumeric());
            treebank_form(&text[s.start..s.end], opening)
        })
        .collect();
    let tags = tagger.tag(&forms);
    let mut out: Vec<Token> = spans
        .iter()
        .zip(tags)
        .map(|(&span, pos)| {
            let surface = text[span.start..span.end].to_string();
            let lemma = lemmatize(&surface, &pos);
            Token {
                surface,
                lemma,
                pos,
                span,
                is_content: false,
            }
        })
        .collect();
    for i in 0..out.len() {
        out[i].is_content = is_content(&out, i);
    }
    out
}

/// Nouns, adjectives, adverbs and non-auxiliary verbs. `be` is always
/// auxiliary; `have` and `do` are auxiliary when the next non-adverb token
/// is a verb.
fn is_content(tokens: &[Token], i: usize) -> bool {
    let t = &tokens[i];
    if !t.is_word() {
        return false;
    }
    if t.is_noun() || t.pos.starts_with("JJ") || t.is_adverb() {
        return true;
    }
    if !t.is_verb() {
        return false;
    }
    match t.lemma.as_str() {
        "be" => false,
        "have" | "do" => !tokens[i + 1..]
            .iter()
            .find(|n| !n.is_adverb())
            .is_some_and(|n| n.is_verb()),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_tagger() -> Tagger {
        let (sents, _) = parse_training_text(
            "the/DT dog/NN has/VBZ eaten/VBN ./.\nshe/PRP has/VBZ a/DT dog/NN ./.\nit/PRP was/VBD not/RB eaten/VBN ./.",
        );
        Tagger::train(
            &sents,
            &TrainConfig {
                iterations: 10,
                tagdict_min_count: 1,
                tagdict_min_share: 0.97,
                seed: 3,
            },
        )
        .unwrap()
    }

    #[test]
    fn paragraphs_partition_sentences() {
        let t = tiny_tagger();
        let doc = analyze("Head line\n\nOne. Two.\n\nThree.", &t);
        assert_eq!(doc.sentences.len(), 4);
        assert_eq!(doc.paragraphs, vec![0..1, 1..3, 3..4]);
        assert_eq!(doc.adjacent_pairs(), vec![(1, 2)]);
    }

    #[test]
    fn auxiliaries_are_not_content() {
        let t = tiny_tagger();
        let doc = analyze("the dog has eaten. she has a dog.", &t);
        let flags: Vec<(&str, bool)> = doc
            .tokens
            .iter()
            .flatten()
            .map(|t| (t.surface.as_str(), t.is_content))
            .collect();
        assert_eq!(flags[2], ("has", false));
        assert_eq!(flags[3], ("eaten", true));
        assert_eq!(flags[6], ("has", true));
    }

    #[test]
    fn pretagged_documents() {
        let doc = analyze_pretagged(
            "The/DT cats/NNS sat/VBD ./.\nThey/PRP slept/VBD ./.\n\nDogs/NNS barked/VBD ./.",
        );
        assert_eq!(doc.sentences.len(), 3);
        assert_eq!(doc.paragraphs, vec![0..2, 2..3]);
        assert_eq!(doc.tokens[0][1].lemma, "cat");
        assert_eq!(
            &doc.text[doc.tokens[2][0].span.start..doc.tokens[2][0].span.end],
            "Dogs"
        );
        assert_eq!(doc.word_count(), 7);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn tagger() -> &'static Tagger {
            static T: OnceLock<Tagger> = OnceLock::new();
            T.get_or_init(tiny_tagger)
        }

        proptest! {
            #[test]
            fn span_integrity_and_determinism(text in "\\PC{0,200}") {
                let a = analyze(&text, tagger());
                let b = analyze(&text, tagger());
                prop_assert_eq!(&a, &b);
                for w in a.sentences.windows(2) {
                    prop_assert!(w[0].end <= w[1].start);
                }
                let mut last_end = 0;
                for (s, toks) in a.sentences.iter().zip(&a.tokens) {
                    for t in toks {
                        prop_assert!(s.contains(&t.span));
                        prop_assert!(t.span.start < t.span.end && t.span.end <= text.len());
                        prop_assert!(t.span.start >= last_end);
                        prop_assert!(!t.lemma.is_empty());
                        last_end = t.span.end;
                    }
                }
                let covered: usize = a.paragraphs.iter().map(|p| p.len()).sum();
                prop_assert_eq!(covered, a.sentences.len());
            }
        }
    }
}
