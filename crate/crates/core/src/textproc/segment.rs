//! Paragraph and sentence segmentation.
//!
//! Paragraphs are separated by blank lines. Within a paragraph a sentence
//! ends at a run of `.`, `!` or `?` (optionally followed by closing quotes or
//! brackets) that is followed by whitespace or the end of the paragraph,
//! unless
//! - the terminator is a single `.` after a title abbreviation (`Mr.`, `Dr.`, ...)
//!   or a single-letter initial, or
//! - the next word starts with a lowercase letter or a digit.

use super::Span;

const TITLE_ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "sen", "rep", "gov", "gen", "col", "lt",
    "sgt", "capt", "cmdr", "adm", "maj", "rev", "hon", "pres", "supt", "mt", "ft", "messrs", "no",
    "vs", "v",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}', '\u{bb}'];

/// Byte ranges of paragraphs: maximal runs of lines that are not blank.
pub fn segment_paragraphs(text: &str) -> Vec<Span> {
    let mut paras = Vec::new();
    let mut start: Option<usize> = None;
    let mut end = 0;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                paras.push(Span::new(s, end));
            }
        } else {
            let lead = line.len() - line.trim_start().len();
            if start.is_none() {
                start = Some(line_start + lead);
            }
            end = line_start + line.trim_end().len();
        }
    }
    if let Some(s) = start {
        paras.push(Span::new(s, end));
    }
    paras
}

/// Sentence spans over the whole text, never crossing a paragraph boundary.
pub fn segment_sentences(text: &str) -> Vec<Span> {
    segment_paragraphs(text)
        .into_iter()
        .flat_map(|p| segment_within(text, p))
        .collect()
}

pub(crate) fn segment_within(text: &str, para: Span) -> Vec<Span> {
    let s = &text[para.start..para.end];
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut sent_start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if sent_start.is_none() && !c.is_whitespace() {
            sent_start = Some(pos);
        }
        if matches!(c, '.' | '!' | '?' | '\u{2026}') {
            let mut j = i;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?' | '\u{2026}') {
                j += 1;
            }
            let run_len = j - i;
            while j < chars.len() && CLOSERS.contains(&chars[j].1) {
                j += 1;
            }
            let at_end = j == chars.len();
            let followed_by_space = at_end || chars[j].1.is_whitespace();
            if followed_by_space && is_boundary(s, &chars, i, run_len, j) {
                let end = if at_end { s.len() } else { chars[j].0 };
                if let Some(st) = sent_start.take() {
                    out.push(Span::new(para.start + st, para.start + end));
                }
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(st) = sent_start {
        let end = s.trim_end().len();
        if end > st {
            out.push(Span::new(para.start + st, para.start + end));
        }
    }
    out
}

fn is_boundary(
    s: &str,
    chars: &[(usize, char)],
    term: usize,
    run_len: usize,
    after: usize,
) -> bool {
    if let Some(next) = chars[after..]
        .iter()
        .map(|&(_, c)| c)
        .find(|c| !c.is_whitespace())
    {
        if next.is_lowercase() || next.is_ascii_digit() {
            return false;
        }
    }
    if run_len == 1 && chars[term].1 == '.' {
        let word = preceding_word(s, chars[term].0);
        let lower = word.to_lowercase();
        if TITLE_ABBREVIATIONS.contains(&lower.as_str()) {
            return false;
        }
        let mut wc = word.chars();
        if let (Some(c), None) = (wc.next(), wc.next()) {
            if c.is_uppercase() {
                return false;
            }
        }
    }
    true
}

fn preceding_word(s: &str, dot: usize) -> &str {
    let before = &s[..dot];
    let start = before
        .char_indices()
        .rev()
        .find(|&(_, c)| !c.is_alphabetic())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    &before[start..]
}
